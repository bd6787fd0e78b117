"""Frequency-side machinery behind the spectral counts.

Transforms use f^(xi) = int f(x) exp(-i x xi) dx, under which
(sech^2)^(xi) = rho(xi) = pi xi / sinh(pi xi / 2). With that convention
the transform of V*g is (V^ * g^)/(2 pi), so the integral operator

    S_theta g(xi) = (1 / w_theta(xi)) int K(xi - eta) g(eta) d eta,
    K = (V)^ / (2 pi),   w_theta = xi^4 + xi^2 + theta + alpha,

has eigenvalue 1 exactly when -theta is an eigenvalue of
d^4 - d^2 + alpha - V. Here V = 3 phi^2 (family "L1") or phi^2 ("L2").

The L1 potential is varphi^2 with varphi = sqrt(3) phi, the normalization
under which (M + alpha) varphi = varphi^3 / 3 holds; S_theta is built from
the raw potential and that normalization is never imposed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg as sla
from scipy.optimize import brentq

from .wave import ALPHA, AMPLITUDE, WIDTH

_SCALE = {"L1": 3.0, "L2": 1.0}


def rho(xi):
    """pi xi / sinh(pi xi / 2), with rho(0) = 2; overflow-free for large |xi|."""
    t = 0.5 * np.pi * np.abs(np.asarray(xi, dtype=float))
    small = t < 1e-4
    ts = np.where(small, 1.0, t)
    big = 4.0 * ts * np.exp(-ts) / -np.expm1(-2.0 * ts)
    out = np.where(small, 2.0 / (1.0 + t**2 / 6.0), big)
    return out if out.ndim else float(out)


def phi_hat(xi):
    """Transform of the wave profile: (a / b) rho(xi / b) > 0."""
    return AMPLITUDE / WIDTH * rho(np.asarray(xi) / WIDTH)


@dataclass(frozen=True)
class FreqGrid:
    """Uniform frequency nodes on [-Xi, Xi) with spacing 2 Xi / M."""

    half_width: float = 40.0
    n_nodes: int = 1600

    @property
    def step(self) -> float:
        return 2.0 * self.half_width / self.n_nodes

    @property
    def nodes(self) -> np.ndarray:
        return -self.half_width + self.step * np.arange(self.n_nodes)


@lru_cache(maxsize=8)
def _phi_sq_hat_lattice(step: float, n_half: int) -> np.ndarray:
    # (phi^2)^ on the lattice k*step, |k| <= n_half, as (phi^ * phi^)/(2 pi).
    # Direct (not FFT) convolution: a sum of positive terms keeps relative
    # accuracy far into the exponentially small tail.
    pad = n_half + int(np.ceil(60.0 * WIDTH / step))
    eta = step * np.arange(-pad, pad + 1)
    f = phi_hat(eta)
    conv = np.convolve(f, f) * step / (2.0 * np.pi)
    mid = len(conv) // 2
    out = conv[mid - n_half: mid + n_half + 1]
    out.setflags(write=False)
    return out


def potential_hat(which: str, xi_lattice_step: float, n_half: int) -> np.ndarray:
    """(c phi^2)^ on k*step, k = -n_half..n_half (c = 3 for L1, 1 for L2)."""
    return _SCALE[which] * _phi_sq_hat_lattice(float(xi_lattice_step), int(n_half))


@lru_cache(maxsize=8)
def kernel_matrix(which: str, freq: FreqGrid) -> np.ndarray:
    """K(xi_i - xi_j) * dxi on the frequency nodes."""
    if which not in _SCALE:
        raise ValueError(f"unknown family {which!r}")
    m = freq.n_nodes
    Khat = potential_hat(which, freq.step, m - 1) / (2.0 * np.pi)
    idx = np.arange(m)
    Kmat = Khat[(idx[:, None] - idx[None, :]) + (m - 1)] * freq.step
    Kmat.setflags(write=False)
    return Kmat


@dataclass(frozen=True)
class PF2Report:
    passed: bool
    positive: bool
    log_concave: bool
    max_log_second_derivative: float
    first_violation: float | None
    n_determinant_checks: int
    determinant_violations: int
    first_bad_quadruple: tuple | None


def pf2_check(
    values: np.ndarray,
    step: float,
    n_quadruples: int = 1000,
    seed: int = 0,
    rtol: float = 1e-12,
) -> PF2Report:
    """Check PF(2) for a function sampled on the symmetric lattice k*step.

    Log-concavity is the sufficient test: the second difference of log h must
    be negative at every interior node (the node at 0, where the criterion is
    not required, is tested with a one-sided stencil). The 2x2 determinant
    condition is spot-checked on random lattice quadruples x1<x2, y1<y2.
    """
    h = np.asarray(values, dtype=float)
    n = len(h)
    if n % 2 == 0:
        raise ValueError("samples must sit on a symmetric odd-length lattice")
    centre = n // 2
    positive = bool(np.all(h > 0))
    if not positive:
        bad = int(np.argmax(~(h > 0)))
        return PF2Report(False, False, False, np.nan, (bad - centre) * step, 0, 0, None)

    lg = np.log(h)
    d2 = np.full(n, -np.inf)
    d2[1:-1] = (lg[2:] - 2.0 * lg[1:-1] + lg[:-2]) / step**2
    if 0 < centre < n - 3:
        d2[centre] = (2 * lg[centre] - 5 * lg[centre + 1] + 4 * lg[centre + 2] - lg[centre + 3]) / step**2
    interior = d2[1:-1]
    log_concave = bool(np.all(interior < 0))
    first = None
    if not log_concave:
        first = (1 + int(np.argmax(interior >= 0)) - centre) * step

    rng = np.random.default_rng(seed)
    span = centre // 2
    viol, first_quad = 0, None
    for _ in range(n_quadruples):
        x1, x2 = np.sort(rng.choice(np.arange(-span, span + 1), 2, replace=False))
        y1, y2 = np.sort(rng.choice(np.arange(-span, span + 1), 2, replace=False))
        a = h[centre + x1 - y1] * h[centre + x2 - y2]
        b = h[centre + x1 - y2] * h[centre + x2 - y1]
        if a - b < -rtol * max(a, b):
            viol += 1
            if first_quad is None:
                first_quad = tuple(float(s * step) for s in (x1, x2, y1, y2))
    return PF2Report(
        passed=positive and log_concave and viol == 0,
        positive=positive,
        log_concave=log_concave,
        max_log_second_derivative=float(np.max(interior)),
        first_violation=first,
        n_determinant_checks=n_quadruples,
        determinant_violations=viol,
        first_bad_quadruple=first_quad,
    )


@dataclass(frozen=True)
class SThetaOperator:
    which: str
    theta: float
    freq: FreqGrid
    weight: np.ndarray
    kernel: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        """Non-symmetric Nystrom matrix S[i, j] = K(xi_i - xi_j) dxi / w(xi_i)."""
        return self.kernel / self.weight[:, None]

    @property
    def symmetric(self) -> np.ndarray:
        """Similar symmetric form W^{1/2} S W^{-1/2}."""
        s = np.sqrt(self.weight)
        return self.kernel / np.outer(s, s)

    def eig(self, k: int | None = None):
        """Eigenpairs ordered by decreasing |lambda|.

        Eigenfunctions are returned in the original variable (g = W^{-1/2} y)
        and normalized in the weighted norm ||g||_X^2 = sum g^2 w dxi.
        """
        n = self.freq.n_nodes
        if k is None:
            lam, y = sla.eigh(self.symmetric)
        else:
            # K is the transform of a positive function, so S_theta >= 0 and
            # the largest |lambda| are the largest lambda.
            lam, y = sla.eigh(self.symmetric, subset_by_index=[n - k, n - 1])
        order = np.argsort(-np.abs(lam), kind="stable")
        lam, y = lam[order], y[:, order]
        g = y / np.sqrt(self.weight)[:, None] / np.sqrt(self.freq.step)
        sign = np.sign(g[np.argmax(np.abs(g), axis=0), np.arange(g.shape[1])])
        return lam, g * sign

    def top_eigenvalue(self) -> float:
        n = self.freq.n_nodes
        return float(sla.eigh(self.symmetric, eigvals_only=True, subset_by_index=[n - 1, n - 1])[0])


def build_stheta(which: str, theta: float, freq: FreqGrid = FreqGrid()) -> SThetaOperator:
    if theta < 0:
        raise ValueError(f"theta must be >= 0, got {theta}")
    xi = freq.nodes
    w = xi**4 + xi**2 + theta + ALPHA
    return SThetaOperator(which, float(theta), freq, w, kernel_matrix(which, freq))


@dataclass(frozen=True)
class EigCurve:
    which: str
    thetas: np.ndarray
    values: np.ndarray  # shape (n_theta, n_eig), decreasing |lambda| along axis 1
    ground_one_signed: np.ndarray

    @property
    def lambda0(self) -> np.ndarray:
        return self.values[:, 0]


def eig_curve(which: str, thetas, n_eig: int = 4, freq: FreqGrid = FreqGrid()) -> EigCurve:
    thetas = np.asarray(thetas, dtype=float)
    if np.any(np.diff(thetas) <= 0) or np.any(thetas < 0):
        raise ValueError("thetas must be ascending and nonnegative")
    vals, signed = [], []
    for th in thetas:
        lam, g = build_stheta(which, th, freq).eig(n_eig)
        vals.append(lam)
        g0 = g[:, 0]
        signed.append(bool(np.min(g0) > -1e-10 * np.max(np.abs(g0))))
    return EigCurve(which, thetas, np.array(vals), np.array(signed))


def crossing_theta(which: str, freq: FreqGrid = FreqGrid(), theta_max: float = 10.0) -> float:
    """theta* with lambda_0(theta*) = 1; 0.0 if lambda_0(0) <= 1."""
    f = lambda th: build_stheta(which, th, freq).top_eigenvalue() - 1.0
    f0 = f(0.0)
    if f0 <= 0.0:
        return 0.0
    if f(theta_max) > 0:
        raise ValueError(f"lambda_0 stays above 1 on [0, {theta_max}]")
    return float(brentq(f, 0.0, theta_max, xtol=1e-13, rtol=1e-14))


def even_eigenvalues(which: str = "L1", n: int = 40, freq: FreqGrid = FreqGrid()) -> np.ndarray:
    """Eigenvalues of S_0 with even eigenfunctions, in decreasing order."""
    lam, g = build_stheta(which, 0.0, freq).eig()
    rev = g[::-1]
    # nodes -Xi + k*step are symmetric about 0 only after dropping node -Xi
    even = np.linalg.norm(g[1:] - rev[:-1], axis=0) < np.linalg.norm(g[1:] + rev[:-1], axis=0)
    return lam[even][:n]
