"""PF(2) kernels and the S_theta eigenvalue curves in frequency space."""

import numpy as np

from f4nls.totalpos import FreqGrid, build_stheta, crossing_theta, eig_curve, pf2_check, potential_hat, rho

freq = FreqGrid(20.0, 400)
n = freq.n_nodes
lattice = freq.step * np.arange(-n, n + 1)

for name, values in (("rho", rho(lattice)), ("(3 phi^2)^", potential_hat("L1", freq.step, n - 1))):
    rep = pf2_check(values, freq.step)
    print(f"{name}: PF(2) {rep.passed}, max (log h)'' = {rep.max_log_second_derivative:.3e}")
print(f"1 + xi^2: PF(2) {pf2_check(1 + lattice**2, freq.step).passed}")

thetas = np.linspace(0.0, 1.0, 6)
for which in ("L2", "L1"):
    c = eig_curve(which, thetas, freq=freq)
    print(f"{which} family, lambda_0(theta): {np.round(c.lambda0, 6)}")
print(f"L1 family at theta = 10: {build_stheta('L1', 10.0, freq).top_eigenvalue():.6f}")

# lambda_0(theta*) = 1 marks -theta* as the negative eigenvalue of L1
print(f"theta* = {crossing_theta('L1', freq):.10f}")
