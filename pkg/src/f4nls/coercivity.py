"""Weinstein quantity and the positivity chain for G''(Phi).

The quadratic form of G''(Phi) on pairs v = (P, Q) is (L1 P, P) + (L2 Q, Q).
Coercivity is measured against the H2 norm, so every bound here is the
lowest eigenvalue of a pencil (A_block + penalty, H_block) restricted to the
complement of a set of linear constraints. Each constraint pairs one
component with a field, in either L2 or H2; the blocks decouple and are
solved separately.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.linalg as sla
from scipy.special import gammaln

from .grid import GridSpec, NormKind
from .linops import (
    TOL_ZERO,
    build_operator,
    complement_basis,
    constrained_min,
    h2_matrix,
    spectrum,
)
from .wave import WIDTH, WaveProfile, profile


class KernelMismatchError(RuntimeError):
    pass


@dataclass(frozen=True)
class WeinsteinReport:
    I_direct: float
    chi: np.ndarray = field(repr=False)
    orth_residual: float
    equation_residual: float
    I_series: float | None = None
    series_terms: int = 0
    series_tail_bound: float | None = None


def weinstein_direct(grid: GridSpec, wave: WaveProfile | None = None, tol_zero: float = TOL_ZERO) -> WeinsteinReport:
    """I = (chi, phi) with L1 chi = phi and chi orthogonal to ker L1.

    chi is the spectral pseudo-inverse applied to phi; phi is odd-free
    (even) so it has no component along the kernel direction phi'.
    """
    wave = profile(grid) if wave is None else wave
    op = build_operator("L1", grid, wave)
    lam, vec = sla.eigh(op.matrix)
    kernel = np.abs(lam) <= tol_zero
    if int(kernel.sum()) != 1:
        raise KernelMismatchError(f"expected a one-dimensional kernel, found {int(kernel.sum())}")
    phi = np.asarray(wave.values)
    coef = vec.T @ phi
    keep = ~kernel
    chi = vec[:, keep] @ (coef[keep] / lam[keep])
    h = grid.spacing
    return WeinsteinReport(
        I_direct=float(h * chi @ phi),
        chi=chi,
        orth_residual=float(h * chi @ wave.derivative),
        equation_residual=float(np.sqrt(h) * np.linalg.norm(op.apply(chi) - phi)),
    )


# Gegenbauer-coefficient series for an operator of order 2n with a
# sech^(2n/p) wave; here n = 2, p = 2, so r = 2n/p = 2.
SERIES_N = 2
SERIES_R = 2


def series_prefactor(n: int = SERIES_N, r: int = SERIES_R) -> float:
    return float((2.0 ** (n + r - 1) * np.exp(gammaln(r) - gammaln(n)) / np.pi) ** 2)


def series_weights(j_max: int, n: int = SERIES_N, r: int = SERIES_R) -> np.ndarray:
    """a * Gamma(2j+1)(2j+n+r-1/2)/Gamma(2j+2n+2r-1) * [Gamma(j+n)Gamma(j+n+r-1/2)/(Gamma(j+1)Gamma(j+r+1/2))]^2."""
    j = np.arange(j_max, dtype=float)
    lf1 = gammaln(2 * j + 1) + np.log(2 * j + n + r - 0.5) - gammaln(2 * j + 2 * n + 2 * r - 1)
    lf2 = gammaln(j + n) + gammaln(j + n + r - 0.5) - gammaln(j + 1) - gammaln(j + r + 0.5)
    return series_prefactor(n, r) * np.exp(lf1 + 2 * lf2)


# The series is written for the operator rescaled to unit sech width
# (y = b x) with the nonlinearity normalized to varphi = sqrt(3) phi, and its
# transform constant differs by pi^2. Mapping back to (chi, phi) on the
# physical line multiplies by pi^2 / (3 b).
SERIES_TO_PHYSICAL = np.pi**2 / (3.0 * WIDTH)


@dataclass(frozen=True)
class SeriesResult:
    value: float
    normalized_value: float
    terms: int
    tail_bound: float


def weinstein_series(even_lambdas: Sequence[float], j_max: int | None = None) -> SeriesResult:
    """Partial sum of sum_j lambda_2j/(1 - lambda_2j) * weight_j.

    ``even_lambdas`` are the eigenvalues of the L1-family S_0 belonging to
    even eigenfunctions, in decreasing order (lambda_0 = 3 first).
    """
    lam = np.asarray(even_lambdas, dtype=float)
    j_max = len(lam) if j_max is None else j_max
    if j_max < 10:
        raise ValueError("need at least 10 terms")
    if j_max > len(lam):
        raise ValueError(f"only {len(lam)} eigenvalues supplied for j_max={j_max}")
    lam = lam[:j_max]
    if np.any(np.abs(lam[1:] - 1.0) < 1e-8):
        raise ValueError("an even eigenvalue equals 1 for j >= 1 (spurious kernel)")
    terms = series_weights(j_max) * lam / (1.0 - lam)
    s = float(np.sum(terms))
    # terms decay like j^-5; the remainder is bounded by the last term times j/4
    tail = float(abs(terms[-1]) * j_max / 4.0)
    return SeriesResult(s * SERIES_TO_PHYSICAL, s, j_max, tail * SERIES_TO_PHYSICAL)


def weinstein(grid: GridSpec, even_lambdas: Sequence[float], j_max: int | None = None) -> WeinsteinReport:
    rep = weinstein_direct(grid)
    ser = weinstein_series(even_lambdas, j_max)
    return replace(rep, I_series=ser.value, series_terms=ser.terms, series_tail_bound=ser.tail_bound)


@dataclass(frozen=True)
class Constraint:
    """(v_component, field)_kind = 0 with component 'P' or 'Q'."""

    component: str
    field: np.ndarray = field(repr=False)
    kind: NormKind = NormKind.L2
    label: str = ""

    def __post_init__(self):
        if self.component not in ("P", "Q"):
            raise ValueError(f"component must be 'P' or 'Q', got {self.component!r}")


class CoercivityProblem:
    """Matrices of L1, L2 and the H2 form on one grid, assembled once."""

    def __init__(self, grid: GridSpec, wave: WaveProfile | None = None):
        self.grid = grid
        self.wave = profile(grid) if wave is None else wave
        self.op1 = build_operator("L1", grid, self.wave)
        self.op2 = build_operator("L2", grid, self.wave)

    @cached_property
    def H(self) -> np.ndarray:
        return h2_matrix(self.grid)

    @property
    def phi(self) -> np.ndarray:
        return np.asarray(self.wave.values)

    @property
    def dphi(self) -> np.ndarray:
        return np.asarray(self.wave.derivative)

    # constraint sets -------------------------------------------------------
    def l2_constraints(self) -> list[Constraint]:
        """(Q, phi) = (P, phi) = (P, phi') = 0, all in L2."""
        return [
            Constraint("Q", self.phi, NormKind.L2, "Q.phi"),
            Constraint("P", self.phi, NormKind.L2, "P.phi"),
            Constraint("P", self.dphi, NormKind.L2, "P.phi'"),
        ]

    def symmetry_constraints(self) -> list[Constraint]:
        """H2-orthogonality to J Phi = (0, phi) and Phi' = (phi', 0)."""
        return [
            Constraint("Q", self.phi, NormKind.H2, "JPhi"),
            Constraint("P", self.dphi, NormKind.H2, "Phi'"),
        ]

    def z_constraints(self) -> list[Constraint]:
        """Symmetry constraints plus (v, R^{-1} I Phi)_{H2} = (P, phi)_{L2} = 0."""
        return self.symmetry_constraints() + [Constraint("P", self.phi, NormKind.L2, "R^-1 I Phi")]

    # -----------------------------------------------------------------------
    def _row(self, c: Constraint) -> np.ndarray:
        f = np.asarray(c.field, dtype=float)
        return f if NormKind(c.kind) is NormKind.L2 else self.H @ f

    def reduced_block(self, component: str, constraints: Sequence[Constraint]):
        """Standard-form matrix of the block pencil on the constraint complement.

        Returns (B, T) with T mapping reduced coordinates to grid vectors such
        that v = T y has ||v||_{H2}^2 = h |y|^2 and (L v, v) = h y^T B y.
        """
        A = (self.op1 if component == "P" else self.op2).matrix
        rows = [self._row(c) for c in constraints if c.component == component]
        Z = complement_basis(rows, self.grid.n_points)
        C = Z.T @ self.H @ Z
        R = np.linalg.cholesky(C)  # C = R R^T
        T = sla.solve_triangular(R, Z.T, lower=True).T  # Z R^{-T}
        B = T.T @ A @ T
        return 0.5 * (B + B.T), T


@dataclass(frozen=True)
class SubspaceBoundReport:
    label: str
    constraints: tuple[str, ...]
    lambda_min: float
    lambda_P: float
    lambda_Q: float
    M: float | None = None
    minimizer: np.ndarray | None = field(default=None, repr=False)


def subspace_bound(
    problem: CoercivityProblem,
    constraints: Sequence[Constraint],
    M: float | None = None,
    label: str = "",
) -> SubspaceBoundReport:
    """Lowest value of [(Lv,v) + 2M (Phi, v)_{L2}^2] / ||v||_{H2}^2 on the constraint complement.

    The minimizer is returned as a complex field P + iQ with unit H2 norm.
    """
    if M is not None and M < 0:
        raise ValueError("M must be nonnegative")
    h = problem.grid.spacing
    out = {}
    for comp in ("P", "Q"):
        B, T = problem.reduced_block(comp, constraints)
        if comp == "P" and M:
            u = T.T @ problem.phi
            B = B + 2.0 * M * h * np.outer(u, u)
        lam, y = sla.eigh(B, subset_by_index=[0, 0])
        out[comp] = (float(lam[0]), T @ y[:, 0] / np.sqrt(h))
    comp = min(out, key=lambda c: out[c][0])
    vec = out[comp][1]
    v = vec.astype(complex) if comp == "P" else 1j * vec
    return SubspaceBoundReport(
        label=label,
        constraints=tuple(c.label for c in constraints),
        lambda_min=out[comp][0],
        lambda_P=out["P"][0],
        lambda_Q=out["Q"][0],
        M=M,
        minimizer=v,
    )


class MCalibrationError(ValueError):
    pass


def calibrate_M(
    problem: CoercivityProblem,
    delta: float,
    rtol: float = 1e-3,
    M_max: float = 1e8,
) -> float:
    """Smallest M with the augmented bound on {J Phi, Phi'}^perp at least delta/2."""
    if not delta > 0:
        raise MCalibrationError("target delta must be positive")
    cons = problem.symmetry_constraints()
    B, T = problem.reduced_block("P", cons)
    lamQ = subspace_bound(problem, [c for c in cons if c.component == "Q"]).lambda_Q
    target = 0.5 * delta
    if lamQ < target:
        raise MCalibrationError(f"Q block bound {lamQ:.3e} is below delta/2 = {target:.3e}")
    u = T.T @ problem.phi
    h = problem.grid.spacing

    def lam(M):
        return sla.eigh(B + 2.0 * M * h * np.outer(u, u), eigvals_only=True, subset_by_index=[0, 0])[0]

    if lam(0.0) >= target:
        return 0.0
    lo, hi = 0.0, 1.0
    while lam(hi) < target:
        lo, hi = hi, hi * 4.0
        if hi > M_max:
            raise MCalibrationError(f"delta/2 = {target:.3e} not reached for M <= {M_max:g}")
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if lam(mid) >= target:
            hi = mid
        else:
            lo = mid
    return float(hi)


def crossover_M(problem: CoercivityProblem, rtol: float = 1e-6) -> float:
    """M at which the augmented bound on {J Phi, Phi'}^perp changes sign."""
    B, T = problem.reduced_block("P", problem.symmetry_constraints())
    u = T.T @ problem.phi
    h = problem.grid.spacing
    lam = lambda M: sla.eigh(B + 2.0 * M * h * np.outer(u, u), eigvals_only=True, subset_by_index=[0, 0])[0]
    lo, hi = 0.0, 1.0
    while lam(hi) <= 0:
        lo, hi = hi, 2 * hi
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if lam(mid) > 0 else (mid, hi)
    return float(hi)


def gamma_and_deltas(problem: CoercivityProblem) -> dict[str, float]:
    """L2-constrained minima: gamma ({phi}), delta_1 ({phi, phi'}), delta_2 ({phi})."""
    phi, dphi = problem.phi, problem.dphi
    return {
        "gamma": constrained_min(problem.op1, [phi])[0],
        "delta_1": constrained_min(problem.op1, [phi, dphi])[0],
        "delta_2": constrained_min(problem.op2, [phi])[0],
    }


def kernel_spectra(problem: CoercivityProblem, k: int = 8):
    return spectrum(problem.op1, k), spectrum(problem.op2, k)
