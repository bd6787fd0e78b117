"""The quantity (chi, phi) with L1 chi = phi, computed two ways."""

import numpy as np

from f4nls import make_grid
from f4nls.coercivity import weinstein, weinstein_series
from f4nls.totalpos import even_eigenvalues

grid = make_grid(96.0, 2048)
lam = even_eigenvalues("L1")
rep = weinstein(grid, lam)
print(f"direct solve:  I = {rep.I_direct:.10f}  (||L1 chi - phi|| = {rep.equation_residual:.1e})")
print(f"series:        I = {rep.I_series:.10f}  ({rep.series_terms} terms, tail <= {rep.series_tail_bound:.1e})")

# the S_0 eigenvalues are 360/((k+2)(k+3)(k+4)(k+5)); the series converges on them
k = 2 * np.arange(200)
exact = weinstein_series(360.0 / ((k + 2) * (k + 3) * (k + 4) * (k + 5)))
print(f"series with exact eigenvalues: I = {exact.value:.10f} (normalized sum {exact.normalized_value:.14f})")
