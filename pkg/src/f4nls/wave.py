"""Explicit standing wave and the conserved functionals.

The profile phi(x) = a sech^2(b x) with a = sqrt(3/10), b = sqrt(1/20)
solves phi'''' - phi'' + alpha*phi - phi^3 = 0 for alpha = 4/25, so that
u(x, t) = exp(i alpha t) phi(x) solves i u_t + u_xx - u_xxxx + |u|^2 u = 0.

States are stored as complex samples u = P + iQ; every functional below
accepts either a complex u or a real pair (P, Q).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridSpec, derivative

AMPLITUDE = np.sqrt(3.0 / 10.0)
WIDTH = np.sqrt(1.0 / 20.0)
ALPHA = 4.0 / 25.0


@dataclass(frozen=True)
class WaveProfile:
    grid: GridSpec
    values: np.ndarray
    derivative: np.ndarray
    amplitude: float = AMPLITUDE
    width: float = WIDTH
    alpha: float = ALPHA

    @property
    def Phi(self) -> np.ndarray:
        """The pair (phi, 0) as a complex field."""
        return self.values.astype(complex)


@dataclass(frozen=True)
class FunctionalValue:
    E: float
    F: float
    G: float


def profile(grid: GridSpec) -> WaveProfile:
    a, b = AMPLITUDE, WIDTH
    s = 1.0 / np.cosh(b * grid.x)
    phi = a * s**2
    dphi = -2.0 * a * b * s**2 * np.tanh(b * grid.x)
    phi.setflags(write=False)
    dphi.setflags(write=False)
    return WaveProfile(grid, phi, dphi)


def ode_residual(p: WaveProfile, alpha: float | None = None) -> float:
    """Max-norm of phi'''' - phi'' + alpha*phi - phi^3 with spectral derivatives."""
    alpha = p.alpha if alpha is None else alpha
    phi = np.asarray(p.values, dtype=float)
    res = derivative(p.grid, phi, 4) - derivative(p.grid, phi, 2) + alpha * phi - phi**3
    return float(np.max(np.abs(res)))


def _as_complex(P, Q=None) -> np.ndarray:
    P = np.asarray(P)
    if Q is None:
        return P.astype(complex)
    if np.iscomplexobj(P) or np.iscomplexobj(Q):
        raise ValueError("pass either a complex field or a real pair (P, Q)")
    if P.shape != np.shape(Q):
        raise ValueError("P and Q live on different grids")
    return P + 1j * np.asarray(Q)


def functionals(grid: GridSpec, P, Q=None, alpha: float = ALPHA) -> FunctionalValue:
    """Energy E, mass F and G = E + alpha F of the state (P, Q)."""
    u = _as_complex(P, Q)
    if u.shape != (grid.n_points,):
        raise ValueError("field does not live on this grid")
    h, n = grid.spacing, grid.n_points
    uh = np.fft.fft(u)
    kinetic = h / n * np.sum((grid.xi**4 + grid.xi**2) * np.abs(uh) ** 2)
    rho = np.abs(u) ** 2
    E = 0.5 * (kinetic - 0.5 * h * np.sum(rho**2))
    F = 0.5 * h * np.sum(rho)
    return FunctionalValue(float(E), float(F), float(E + alpha * F))


def gradient_G(grid: GridSpec, P, Q=None, alpha: float = ALPHA):
    """L2 gradient of G at (P, Q); returned as a real pair if a pair was given."""
    u = _as_complex(P, Q)
    uh = np.fft.fft(u)
    lin = np.fft.ifft((grid.xi**4 + grid.xi**2 + alpha) * uh)
    g = lin - np.abs(u) ** 2 * u
    if Q is None and np.iscomplexobj(P):
        return g
    return g.real, g.imag
