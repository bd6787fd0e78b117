"""Dense discretizations of the linearized operators.

    L1 = d^4 - d^2 + alpha - 3 phi^2
    L2 = d^4 - d^2 + alpha - phi^2
    L  = diag(L1, L2)

A Fourier multiplier on the periodic grid is a circulant matrix, so the
matrix of m(xi) + alpha is assembled from its first column and is exactly
symmetric. Quadratic forms are (Lv, v)_{L2} = h v^T A v.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .grid import GridSpec, NormKind
from .wave import ALPHA, WaveProfile

TOL_ZERO = 1e-6

_POTENTIAL_SCALE = {"L1": 3.0, "L2": 1.0}


class EigensolverError(RuntimeError):
    pass


def symbol(grid: GridSpec) -> np.ndarray:
    """m(xi) = xi^4 + xi^2 in FFT order."""
    return grid.xi**4 + grid.xi**2


def multiplier_matrix(grid: GridSpec, mult: np.ndarray) -> np.ndarray:
    """Circulant matrix of an even real Fourier multiplier."""
    col = np.fft.ifft(mult).real
    col = 0.5 * (col + np.roll(col[::-1], 1))
    return sla.circulant(col)


def h2_matrix(grid: GridSpec) -> np.ndarray:
    """Matrix of the H2 form: ||v||_{H2}^2 = h v^T H v."""
    return multiplier_matrix(grid, grid.h2_weight)


@dataclass(frozen=True)
class OperatorDisc:
    grid: GridSpec
    which: str
    multiplier: np.ndarray
    potential: np.ndarray
    alpha: float = ALPHA
    matrix: np.ndarray = field(repr=False, default=None)

    def apply(self, v: np.ndarray) -> np.ndarray:
        """Action by FFT; does not touch the dense matrix."""
        out = np.fft.ifft(self.multiplier * np.fft.fft(v))
        out = out.real if np.isrealobj(v) else out
        return out - self.potential * v

    def form(self, v: np.ndarray, w: np.ndarray | None = None) -> float:
        """(L v, w)_{L2}."""
        w = v if w is None else w
        return float(self.grid.spacing * np.sum((self.apply(v) * np.conj(w)).real))


def build_operator(
    which: str,
    grid: GridSpec,
    wave: WaveProfile,
    potential: np.ndarray | None = None,
) -> OperatorDisc:
    """Assemble L1 or L2; ``potential`` overrides c*phi^2 (e.g. zeros)."""
    if which not in _POTENTIAL_SCALE:
        raise ValueError(f"unknown operator {which!r}; expected 'L1' or 'L2'")
    if potential is None:
        potential = _POTENTIAL_SCALE[which] * np.asarray(wave.values) ** 2
    potential = np.asarray(potential, dtype=float)
    mult = symbol(grid) + wave.alpha
    A = multiplier_matrix(grid, mult) - np.diag(potential)
    for arr in (mult, potential, A):
        arr.setflags(write=False)
    return OperatorDisc(grid, which, mult, potential, wave.alpha, A)


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    n_negative: int
    n_zero: int
    essential_edge: float
    tol_zero: float = TOL_ZERO

    def zero_gap(self) -> float:
        """Smallest |lambda| outside the numerical kernel."""
        mags = np.abs(self.eigenvalues)
        return float(np.min(mags[mags > self.tol_zero]))


def spectrum(op: OperatorDisc, k: int = 8, tol_zero: float = TOL_ZERO) -> SpectrumReport:
    """All eigenvalues, plus the ``k`` lowest eigenvectors (unit Euclidean norm)."""
    n = op.grid.n_points
    if not 0 < k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    try:
        lam, vec = sla.eigh(op.matrix)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"dense eigensolve failed for {op.which}: {exc}") from exc
    vec = vec[:, :k]
    res = np.linalg.norm(op.matrix @ vec - vec * lam[:k], axis=0)
    return SpectrumReport(
        eigenvalues=lam,
        eigenvectors=vec,
        residuals=res,
        n_negative=int(np.sum(lam < -tol_zero)),
        n_zero=int(np.sum(np.abs(lam) <= tol_zero)),
        essential_edge=op.alpha,
        tol_zero=tol_zero,
    )


def complement_basis(constraints: Sequence[np.ndarray], n: int, rtol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of {v : c.v = 0 for every constraint row c}.

    Householder QR of the constraint columns; rank deficiency is an error.
    """
    if len(constraints) == 0:
        return np.eye(n)
    C = np.column_stack([np.asarray(c, dtype=float) for c in constraints])
    Q, R = np.linalg.qr(C, mode="complete")
    d = np.abs(np.diag(R))
    if np.min(d) <= rtol * np.max(d):
        raise ValueError("constraint set is degenerate (linearly dependent)")
    return Q[:, C.shape[1]:]


def constrained_min(
    op: OperatorDisc,
    constraints: Sequence[np.ndarray],
    norm: NormKind = NormKind.L2,
) -> tuple[float, np.ndarray]:
    """Minimum of (Lv, v) / (v, v)_norm over v L2-orthogonal to ``constraints``.

    Returns the minimum and a minimizer normalized to unit ``norm``.
    """
    grid = op.grid
    Z = complement_basis(constraints, grid.n_points)
    B = Z.T @ op.matrix @ Z
    if NormKind(norm) is NormKind.L2:
        lam, y = sla.eigh(B, subset_by_index=[0, 0])
        denom = 1.0
    else:
        C = Z.T @ h2_matrix(grid) @ Z
        lam, y = sla.eigh(B, C, subset_by_index=[0, 0])
        denom = float(y[:, 0] @ C @ y[:, 0])
    v = Z @ y[:, 0] / np.sqrt(grid.spacing * denom)
    return float(lam[0]), v


def matrix_operator_min(
    op1: OperatorDisc,
    op2: OperatorDisc,
    p_constraints: Sequence[np.ndarray] = (),
    q_constraints: Sequence[np.ndarray] = (),
) -> float:
    """Constrained minimum of the block operator diag(L1, L2) on pairs (P, Q).

    Solved on the assembled 2N block system, not block by block.
    """
    n = op1.grid.n_points
    A = np.zeros((2 * n, 2 * n))
    A[:n, :n] = op1.matrix
    A[n:, n:] = op2.matrix
    rows = [np.concatenate([c, np.zeros(n)]) for c in p_constraints]
    rows += [np.concatenate([np.zeros(n), c]) for c in q_constraints]
    Z = complement_basis(rows, 2 * n)
    return float(sla.eigh(Z.T @ A @ Z, eigvals_only=True, subset_by_index=[0, 0])[0])


@dataclass(frozen=True)
class GardingCertificate:
    eps: float
    C: float
    min_eig: float

    @property
    def valid(self) -> bool:
        return self.min_eig >= -1e-10


def garding_certify(op: OperatorDisc, eps: float, resolution: float = 1e-6) -> GardingCertificate:
    """Smallest C (on a ``resolution`` lattice) with (Lv,v) >= eps||v||_{H2}^2 - C||v||^2.

    The threshold is -min_eig(A - eps H); C is that value rounded up, and the
    certificate records one more eigensolve of A - eps H + C I.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(
            f"eps must lie in (0, 1); for eps > 1 the symbol m+alpha falls below "
            f"eps(1+xi^2+xi^4) at large xi and no C exists (got {eps})"
        )
    B = op.matrix - eps * h2_matrix(op.grid)
    lo = sla.eigh(B, eigvals_only=True, subset_by_index=[0, 0])[0]
    C = np.ceil(-lo / resolution) * resolution
    final = sla.eigh(B + C * np.eye(op.grid.n_points), eigvals_only=True, subset_by_index=[0, 0])[0]
    return GardingCertificate(float(eps), float(C), float(final))
