"""Spectra of L1 and L2 around the wave, and the shape of L1's ground state."""

import numpy as np

from f4nls import make_grid, profile
from f4nls.linops import build_operator, spectrum

grid = make_grid(96.0, 1024)
wave = profile(grid)

for which in ("L1", "L2"):
    sp = spectrum(build_operator(which, grid, wave))
    print(f"{which}: lowest eigenvalues {np.round(sp.eigenvalues[:4], 8)}")
    print(f"    negative {sp.n_negative}, zero {sp.n_zero}, gap {sp.zero_gap():.4f}, essential edge {sp.essential_edge}")

# The negative eigenvalue kappa of L1 sits below the edge, so its eigenfunction
# decays like exp(-mu |x|) with mu^4 - mu^2 + alpha - kappa = 0. That quartic
# has complex roots here: the tail oscillates and dips below zero, while the
# Fourier transform stays positive.
sp = spectrum(build_operator("L1", grid, wave))
kappa = sp.eigenvalues[0]
v = sp.eigenvectors[:, 0]
v = v / v[np.argmax(np.abs(v))]
print(f"kappa = {kappa:.11f}")
print(f"decay rates: {np.roots([1, 0, -1, 0, 0.16 - kappa])}")
j = np.argmin(v)
print(f"min of normalized ground state: {v[j]:.3e} at x = {grid.x[j]:.2f}")
vh = np.fft.fft(np.fft.ifftshift(v)).real
print(f"min/max of its transform: {vh.min() / vh.max():.1e}")
