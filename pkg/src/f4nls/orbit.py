"""Orbital distance, the Lyapunov functional, and stability sweeps.

States are complex fields u = P + iQ. The symmetry group acts by
T1(theta) T2(r) u = exp(-i theta) u(. - r), and J acts as multiplication
by i. The distance to the orbit of Phi = (phi, 0) is

    d(u)^2 = min_{theta, r} ||u - exp(-i theta) phi(. - r)||_{H2}^2
           = ||u||^2 + ||phi||^2 - 2 max_r |c(r)|,
    c(r)   = sum_k w_k u^_k conj(phi^_k) exp(i xi_k r) * h / N,

so theta is closed-form for each r and only the shift needs a search.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.stats import spearmanr

from .coercivity import CoercivityProblem, subspace_bound
from .dynamics import IntegratorConfig, TrajectoryDiagnostics, evolve
from .grid import GridSpec, NormKind, derivative, inner, norm, translate
from .wave import WaveProfile, functionals, gradient_G, profile


@dataclass(frozen=True)
class OrbitFit:
    theta: float
    r: float
    distance: float
    orth_residuals: tuple[float, float]
    converged: bool = True


def orbit_point(wave: WaveProfile, theta: float, r: float) -> np.ndarray:
    """T1(theta) T2(r) Phi as a complex field."""
    return np.exp(-1j * theta) * translate(wave.grid, np.asarray(wave.values), r)


def _wrap(r: float, L: float) -> float:
    return (r + L) % (2 * L) - L


def orbit_distance(wave: WaveProfile, u: np.ndarray, max_newton: int = 50) -> OrbitFit:
    grid = wave.grid
    h, n = grid.spacing, grid.n_points
    xi = grid.xi
    X = grid.h2_weight * np.fft.fft(u) * np.conj(np.fft.fft(wave.values))
    # c(r) on every grid shift at once
    c_grid = h * np.fft.ifft(X)
    j = int(np.argmax(np.abs(c_grid)))
    r = _wrap(j * h, grid.half_length)

    def derivs(r):
        e = X * np.exp(1j * xi * r) * (h / n)
        c = e.sum()
        c1 = (1j * xi * e).sum()
        c2 = (-(xi**2) * e).sum()
        g1 = 2.0 * (c1 * np.conj(c)).real
        g2 = 2.0 * (abs(c1) ** 2 + (c2 * np.conj(c)).real)
        return c, g1, g2

    converged = False
    r0 = r
    for _ in range(max_newton):
        c, g1, g2 = derivs(r)
        if g2 >= 0:  # not at a local max of |c|^2
            break
        dr = -g1 / g2
        dr = float(np.clip(dr, -h, h))
        r += dr
        if abs(dr) < 1e-13 * max(1.0, abs(r)):
            converged = True
            break
    if not converged or abs(r - r0) > 2 * h:
        r, converged = r0, False
    c = derivs(r)[0]
    theta = float(-np.angle(c)) if abs(c) > 0 else 0.0
    r = _wrap(r, grid.half_length)

    base = orbit_point(wave, theta, r)
    resid = u - base
    dist = norm(grid, resid, NormKind.H2)
    jdir = 1j * base
    tdir = np.exp(-1j * theta) * translate(grid, np.asarray(wave.derivative), r)
    orth = (inner(grid, resid, jdir, NormKind.H2), inner(grid, resid, tdir, NormKind.H2))
    return OrbitFit(theta, r, dist, orth, converged)


@dataclass(frozen=True)
class LyapunovValue:
    V: float
    M: float
    G_part: float
    mass_part: float


class Lyapunov:
    """V(v) = G(v) - G(Phi) + M (F(v) - F(Phi))^2 with G, F evaluated on the grid."""

    def __init__(self, wave: WaveProfile, M: float):
        if not M > 0:
            raise ValueError("M must be positive")
        self.wave = wave
        self.M = float(M)
        ref = functionals(wave.grid, wave.Phi)
        self.q1 = ref.G
        self.q2 = ref.F

    def __call__(self, u: np.ndarray) -> LyapunovValue:
        f = functionals(self.wave.grid, u)
        g = f.G - self.q1
        m = self.M * (f.F - self.q2) ** 2
        return LyapunovValue(g + m, self.M, g, m)

    def gradient(self, u: np.ndarray) -> np.ndarray:
        """L2 gradient G'(u) + 2M (F(u) - q2) u as a complex field."""
        f = functionals(self.wave.grid, u)
        return gradient_G(self.wave.grid, np.asarray(u, dtype=complex)) + 2 * self.M * (f.F - self.q2) * u


def lyapunov(wave: WaveProfile, u: np.ndarray, M: float) -> LyapunovValue:
    return Lyapunov(wave, M)(u)


def random_bandlimited(grid: GridSpec, rng: np.random.Generator, xi_max: float = 1.0, complex_: bool = True) -> np.ndarray:
    """Random smooth perturbation with Fourier support |xi| <= xi_max, unit H2 norm."""
    n = grid.n_points
    mask = np.abs(grid.xi) <= xi_max
    coef = np.zeros(n, dtype=complex)
    k = int(mask.sum())
    coef[mask] = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    coef[mask] *= np.exp(-((grid.xi[mask] / xi_max) ** 2))
    w = np.fft.ifft(coef)
    if not complex_:
        w = w.real.astype(complex)
    return w / norm(grid, w, NormKind.H2)


@dataclass(frozen=True)
class QuadraticCheckReport:
    c_empirical: float
    ratios: np.ndarray = field(repr=False)
    n_samples: int = 0
    n_violations: int = 0
    first_violation: int | None = None
    max_symmetry_pairing: float = 0.0
    rho: float = 0.0
    R: float = 0.0
    M: float = 0.0

    @property
    def passed(self) -> bool:
        return self.n_violations == 0 and self.c_empirical > 0 and self.max_symmetry_pairing < 1e-8


def quadratic_ratio(wave: WaveProfile, V: Lyapunov, v: np.ndarray) -> float:
    """V(v) / d(v)^2, or nan when v lies on the orbit (d < 1e-12)."""
    d = orbit_distance(wave, v).distance
    if d < 1e-12:
        return float("nan")
    return float(V(v).V / d**2)


def lyapunov_quadratic_check(
    wave: WaveProfile,
    M: float,
    rho: float | None = None,
    n_samples: int = 100,
    seed: int = 0,
    probes: Sequence[np.ndarray] = (),
) -> QuadraticCheckReport:
    """Sample V(v) / d(v)^2 over Phi + w with ||w||_{H2} < rho.

    Random band-limited directions are drawn with a fixed seed; ``probes``
    are extra unit-H2 directions (e.g. the worst direction of the augmented
    form) scanned at several radii with both signs.
    """
    grid = wave.grid
    phi_h2 = norm(grid, wave.values, NormKind.H2)
    rho = 0.05 * phi_h2 if rho is None else rho
    V = Lyapunov(wave, M)
    rng = np.random.default_rng(seed)
    dirs, radii = [], []
    for _ in range(n_samples):
        dirs.append(random_bandlimited(grid, rng, xi_max=rng.uniform(0.3, 2.0)))
        radii.append(rho * rng.uniform(0.05, 0.95))
    for p in probes:
        p = p / norm(grid, p, NormKind.H2)
        for s in (0.05, 0.2, 0.5, 0.95):
            for sign in (1.0, -1.0):
                dirs.append(sign * p)
                radii.append(s * rho)

    ratios = np.full(len(dirs), np.nan)
    viol, first, sym = 0, None, 0.0
    for i, (w, s) in enumerate(zip(dirs, radii)):
        v = wave.Phi + s * w
        grad = V.gradient(v)
        sym = max(
            sym,
            abs(inner(grid, grad, 1j * v)),
            abs(inner(grid, grad, derivative(grid, v, 1))),
        )
        ratios[i] = quadratic_ratio(wave, V, v)
        if np.isnan(ratios[i]):
            continue
        if not ratios[i] > 0:
            viol += 1
            first = i if first is None else first
    c = float(np.nanmin(ratios))
    return QuadraticCheckReport(
        c_empirical=c,
        ratios=ratios,
        n_samples=len(dirs),
        n_violations=viol,
        first_violation=first,
        max_symmetry_pairing=float(sym),
        rho=float(rho),
        R=0.5 * phi_h2**2,
        M=float(M),
    )


def worst_directions(problem: CoercivityProblem, M: float) -> list[np.ndarray]:
    """Minimizer of the augmented form V'' = L + 2M (Phi, .)^2 on {J Phi, Phi'}^perp."""
    rep = subspace_bound(problem, problem.symmetry_constraints(), M=M)
    return [rep.minimizer]


FAMILIES = ("even", "odd", "random-bandlimited", "mass-preserving")


def perturbation(wave: WaveProfile, family: str, seed: int = 0) -> np.ndarray:
    """Unit-H2 perturbation direction for a sweep family."""
    grid = wave.grid
    x = grid.x
    if family == "even":
        w = np.exp(-((x / 4.0) ** 2)).astype(complex)
    elif family == "odd":
        w = (x / 4.0 * np.exp(-((x / 4.0) ** 2))).astype(complex)
    elif family in ("random-bandlimited", "mass-preserving"):
        w = random_bandlimited(grid, np.random.default_rng(seed))
    else:
        raise ValueError(f"unknown perturbation family {family!r}; expected one of {FAMILIES}")
    return w / norm(grid, w, NormKind.H2)


def initial_state(wave: WaveProfile, family: str, delta0: float, seed: int = 0) -> np.ndarray:
    u0 = wave.Phi + delta0 * perturbation(wave, family, seed)
    if family == "mass-preserving":
        q2 = functionals(wave.grid, wave.Phi).F
        u0 = u0 * np.sqrt(q2 / functionals(wave.grid, u0).F)
    return u0


@dataclass
class RunResult:
    delta0: float
    sup_d: float
    V0: float
    V_drift: float
    V_drift_over_V0: float
    chain_ok: bool
    blowup: bool
    trajectory: TrajectoryDiagnostics | None = field(default=None, repr=False)


@dataclass
class StabilitySweep:
    family: str
    amplitudes: np.ndarray
    runs: list[RunResult]
    M: float
    c: float
    V_scale: float

    @property
    def sup_d(self) -> np.ndarray:
        return np.array([r.sup_d for r in self.runs])

    @property
    def V0(self) -> np.ndarray:
        return np.array([r.V0 for r in self.runs])

    def spearman(self) -> float:
        return float(spearmanr(self.amplitudes, self.sup_d).statistic)

    def write(self, outdir) -> None:
        """CSV summary, JSON summary and one (t, d) file per run."""
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        with open(outdir / f"sweep_{self.family}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["family", "delta0", "sup_d", "V0", "c_bound_ok"])
            for r in self.runs:
                w.writerow([self.family, repr(r.delta0), repr(r.sup_d), repr(r.V0), int(r.chain_ok)])
        for i, r in enumerate(self.runs):
            if r.trajectory is None:
                continue
            np.savetxt(
                outdir / f"d_{self.family}_{i:02d}.txt",
                np.column_stack([r.trajectory.times, r.trajectory.d]),
                header="t d",
            )
        (outdir / f"sweep_{self.family}.json").write_text(json.dumps(self.summary(), indent=2, sort_keys=True))

    def summary(self) -> dict:
        return {
            "family": self.family,
            "M": self.M,
            "c": self.c,
            "spearman": self.spearman(),
            "runs": [
                {k: v for k, v in asdict(r).items() if k != "trajectory"} for r in self.runs
            ],
        }


def orbit_monitor(wave: WaveProfile, V: Lyapunov | None = None):
    def monitor(t, u):
        fit = orbit_distance(wave, u)
        out = {"d": fit.distance, "theta": fit.theta, "r": fit.r}
        if V is not None:
            out["V"] = V(u).V
        return out

    return monitor


def stability_experiment(
    wave: WaveProfile,
    family: str,
    amplitudes: Sequence[float],
    cfg: IntegratorConfig,
    M: float,
    c: float,
    seed: int = 0,
    keep_trajectories: bool = True,
) -> StabilitySweep:
    """Evolve Phi + delta0 * perturbation for each amplitude and track d(U(t)) and V(U(t)).

    V drift is reported twice: relative to the size of the conserved
    quantities forming V (|G(Phi)| + M F(Phi)^2) and relative to V(U0).
    """
    amps = np.asarray(amplitudes, dtype=float)
    if np.any(np.diff(amps) <= 0) or np.any(amps > 0.1) or np.any(amps <= 0):
        raise ValueError("amplitudes must be ascending, positive and <= 0.1")
    V = Lyapunov(wave, M)
    scale = abs(V.q1) + M * V.q2**2
    runs = []
    for d0 in amps:
        u0 = initial_state(wave, family, d0, seed)
        traj = evolve(wave.grid, u0, cfg, monitor=orbit_monitor(wave, V))
        V0 = traj.V[0]
        dv = float(np.max(np.abs(traj.V - V0)))
        runs.append(
            RunResult(
                delta0=float(d0),
                sup_d=float(np.max(traj.d)),
                V0=float(V0),
                V_drift=dv / scale,
                V_drift_over_V0=float(dv / abs(V0)),
                chain_ok=bool(np.all(c * traj.d**2 <= V0)),
                blowup=False,
                trajectory=traj if keep_trajectories else None,
            )
        )
    return StabilitySweep(family, amps, runs, float(M), float(c), float(scale))


def separation_profile(wave: WaveProfile, shifts: Sequence[float]) -> np.ndarray:
    """||Phi - T1(pi/2) T2(r) Phi||_{H2}^2 for each r."""
    grid = wave.grid
    return np.array(
        [norm(grid, wave.Phi - orbit_point(wave, np.pi / 2, r), NormKind.H2) ** 2 for r in shifts]
    )


def default_wave(grid: GridSpec) -> WaveProfile:
    return profile(grid)
