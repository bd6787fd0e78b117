"""Numerical verification of orbital stability for the standing wave of
i u_t + u_xx - u_xxxx + |u|^2 u = 0 with profile sqrt(3/10) sech^2(x / sqrt(20))."""

__version__ = "0.1.0"

from .grid import GridSpec, NormKind, make_grid
from .wave import ALPHA, WaveProfile, functionals, profile

__all__ = ["ALPHA", "GridSpec", "NormKind", "WaveProfile", "functionals", "make_grid", "profile", "__version__"]
