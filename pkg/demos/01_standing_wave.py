"""The explicit sech^2 profile: residual, functionals and the critical point."""

import numpy as np

from f4nls import ALPHA, functionals, make_grid, profile
from f4nls.wave import gradient_G, ode_residual

grid = make_grid(96.0, 1024)
wave = profile(grid)

print(f"phi(0) = {wave.values[grid.n_points // 2]:.10f}  (sqrt(3/10) = {np.sqrt(0.3):.10f})")
print(f"alpha  = {ALPHA}")
print(f"ODE residual, max-norm: {ode_residual(wave):.2e}")
print(f"residual with alpha = 0.17: {ode_residual(wave, alpha=0.17):.2e}")

f = functionals(grid, wave.Phi)
print(f"F(Phi) = {f.F:.10f}  (2 sqrt5 / 5 = {2 * np.sqrt(5) / 5:.10f})")
print(f"E(Phi) = {f.E:.10f}")
print(f"G(Phi) = {f.G:.10f}")

# Phi is a critical point of G = E + alpha F
g = gradient_G(grid, wave.Phi)
print(f"max |G'(Phi)| = {np.max(np.abs(g)):.2e}")
