"""Named verification checks grouped by acceptance criterion.

A ``Context`` owns one run configuration and caches the expensive objects
(dense spectra, the coercivity problem, the calibrated M) so the CLI
subcommands, the full report and the test suite share a single code path.
Every check returns a ``Check`` record with its value, tolerance and verdict.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass, field, fields, replace
from functools import cached_property
from typing import Any, Callable

import numpy as np

from .coercivity import (
    CoercivityProblem,
    calibrate_M,
    gamma_and_deltas,
    subspace_bound,
    weinstein,
    weinstein_direct,
)
from .dynamics import IntegratorConfig, evolve, phase_rate
from .grid import GridSpec, NormKind, norm
from .linops import build_operator, garding_certify, spectrum
from .orbit import (
    Lyapunov,
    lyapunov_quadratic_check,
    orbit_distance,
    orbit_monitor,
    orbit_point,
    random_bandlimited,
    separation_profile,
    stability_experiment,
    worst_directions,
)
from .totalpos import (
    FreqGrid,
    build_stheta,
    crossing_theta,
    eig_curve,
    even_eigenvalues,
    pf2_check,
    phi_hat,
    potential_hat,
    rho,
)
from .wave import ALPHA, functionals, ode_residual, profile

DEFAULT_TOLERANCES = {
    "wave_residual": 1e-9,
    "wave_sensitivity": 1e-3,
    "mass_closed_form": 1e-10,
    "kernel_residual": 1e-9,
    "zero_gap": 1e-2,
    "lambda0_L2": 1e-4,
    "cosine": 1e-6,
    "theta_star_rel": 1e-3,
    "weinstein_refine_rel": 1e-4,
    "weinstein_series_rel": 0.1,
    "gamma": 5e-6,
    "garding_C": 1.24,
    "mass_drift": 1e-10,
    "energy_drift": 1e-8,
    "phase_rate": 1e-5,
    "order_low": 3.6,
    "order_high": 4.4,
    "reversibility": 1e-8,
    "V_drift": 1e-7,
    "spearman": 0.9,
    "sup_d_at_1e-2": 0.2,
    "orth_residual": 1e-8,
    "orbit_recovery": 1e-10,
    "orbit_invariance": 1e-9,
    "symmetry_pairing": 1e-8,
    "lyapunov_zero": 1e-10,
    "lyapunov_gradient": 1e-7,
    "c_factor": 4.0,
}


@dataclass(frozen=True)
class RunConfig:
    L: float = 96.0
    N: int = 1024
    dt: float = 1e-3
    t_max: float = 50.0
    record_every: int = 500
    stability_t_max: float = 100.0
    stability_record_every: int = 100
    amplitudes: tuple[float, ...] = (1e-3, 3e-3, 1e-2, 3e-2)
    family: str = "random-bandlimited"
    seed: int = 0
    freq_half_width: float = 40.0
    freq_nodes: int = 1600
    theta_max: float = 1.0
    n_theta: int = 21
    weinstein_N: tuple[int, ...] = (2048, 4096)
    garding_eps: float = 0.5
    n_samples: int = 100
    pf2_quadruples: int = 1000
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def __post_init__(self):
        if self.N < 16 or self.N % 2:
            raise ValueError(f"N must be even and >= 16, got {self.N}")
        if not self.L > 0:
            raise ValueError("L must be positive")
        if self.seed < 0:
            raise ValueError("seed must be an unsigned integer")
        if len(self.weinstein_N) != 2:
            raise ValueError("weinstein_N takes two grid sizes (coarse, fine)")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ValueError(f"unknown tolerance keys: {sorted(unknown)}")
        IntegratorConfig(self.dt, self.t_max, self.record_every)

    def canonical(self) -> str:
        """Stable key=value text; its sha256 identifies the run."""
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "tolerances":
                for k in sorted(v):
                    lines.append(f"tol.{k}={v[k]!r}")
            elif isinstance(v, tuple):
                lines.append(f"{f.name}={','.join(repr(x) for x in v)}")
            else:
                lines.append(f"{f.name}={v!r}")
        return "\n".join(sorted(lines)) + "\n"

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()

    def as_dict(self) -> dict:
        d = asdict(self)
        d["amplitudes"] = list(self.amplitudes)
        d["weinstein_N"] = list(self.weinstein_N)
        return d


def _coerce(name: str, text: str):
    kinds = {f.name: f.type for f in fields(RunConfig)}
    t = kinds[name]
    if name == "amplitudes":
        return tuple(float(s) for s in text.split(","))
    if name == "weinstein_N":
        return tuple(int(s) for s in text.split(","))
    if t == "int":
        return int(text)
    if t == "float":
        return float(text)
    return text


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    """Flat key=value lines; '#' starts a comment; tol.<name> sets a tolerance."""
    base = RunConfig() if base is None else base
    known = {f.name for f in fields(RunConfig)} - {"tolerances"}
    updates: dict[str, Any] = {}
    tols = dict(base.tolerances)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key.startswith("tol."):
            name = key[4:]
            if name not in DEFAULT_TOLERANCES:
                raise ValueError(f"line {lineno}: unknown tolerance {name!r}")
            tols[name] = float(val)
        elif key in known:
            try:
                updates[key] = _coerce(key, val)
            except ValueError as exc:
                raise ValueError(f"line {lineno}: bad value for {key}: {val!r}") from exc
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    return replace(base, tolerances=tols, **updates)


@dataclass(frozen=True)
class Check:
    check_id: str
    criterion: int
    anchor: str
    value: Any
    tolerance: str
    passed: bool

    def as_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "criterion": self.criterion,
            "anchor": self.anchor,
            "value": _jsonable(self.value),
            "tolerance": self.tolerance,
            "passed": bool(self.passed),
        }


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer, int)) and not isinstance(v, bool):
        return int(v)
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


def _fmt(x: float) -> str:
    return f"{x:.6g}"


class Context:
    """Lazily built, cached objects for one configuration."""

    def __init__(self, cfg: RunConfig | None = None):
        self.cfg = RunConfig() if cfg is None else cfg
        self.tol = self.cfg.tolerances
        self.results: dict[str, Any] = {}

    # grids and wave
    @cached_property
    def grid(self) -> GridSpec:
        return GridSpec(self.cfg.L, self.cfg.N)

    @cached_property
    def wave(self):
        return profile(self.grid)

    @cached_property
    def freq(self) -> FreqGrid:
        return FreqGrid(self.cfg.freq_half_width, self.cfg.freq_nodes)

    # operators and spectra
    @cached_property
    def op1(self):
        return build_operator("L1", self.grid, self.wave)

    @cached_property
    def op2(self):
        return build_operator("L2", self.grid, self.wave)

    @cached_property
    def spec1(self):
        return spectrum(self.op1)

    @cached_property
    def spec2(self):
        return spectrum(self.op2)

    @cached_property
    def problem(self) -> CoercivityProblem:
        return CoercivityProblem(self.grid, self.wave)

    @cached_property
    def z_bound(self):
        return subspace_bound(self.problem, self.problem.z_constraints(), label="Z")

    @cached_property
    def M(self) -> float:
        return calibrate_M(self.problem, self.z_bound.lambda_min)

    @cached_property
    def augmented(self):
        return subspace_bound(self.problem, self.problem.symmetry_constraints(), M=self.M, label="augmented")

    @cached_property
    def quadratic(self):
        return lyapunov_quadratic_check(
            self.wave,
            self.M,
            n_samples=self.cfg.n_samples,
            seed=self.cfg.seed,
            probes=worst_directions(self.problem, self.M),
        )

    @cached_property
    def lyapunov(self) -> Lyapunov:
        return Lyapunov(self.wave, self.M)

    def integrator(self, **kw) -> IntegratorConfig:
        base = dict(dt=self.cfg.dt, t_max=self.cfg.t_max, record_every=self.cfg.record_every)
        base.update(kw)
        return IntegratorConfig(**base)

    @cached_property
    def standing_run(self):
        return evolve(self.grid, self.wave.Phi, self.integrator(), monitor=orbit_monitor(self.wave))

    @cached_property
    def sweep(self):
        cfg = self.integrator(t_max=self.cfg.stability_t_max, record_every=self.cfg.stability_record_every)
        return stability_experiment(
            self.wave,
            self.cfg.family,
            self.cfg.amplitudes,
            cfg,
            M=self.M,
            c=self.quadratic.c_empirical,
            seed=self.cfg.seed,
        )

    # check constructors
    def below(self, cid, crit, anchor, value, tol_key, scale=1.0) -> Check:
        tol = self.tol[tol_key] * scale
        return Check(cid, crit, anchor, float(value), f"< {_fmt(tol)}", bool(abs(value) < tol))

    def above(self, cid, crit, anchor, value, threshold) -> Check:
        return Check(cid, crit, anchor, float(value), f"> {_fmt(threshold)}", bool(value > threshold))

    def equals(self, cid, crit, anchor, value, expected) -> Check:
        return Check(cid, crit, anchor, value, f"== {expected}", bool(value == expected))

    def holds(self, cid, crit, anchor, value, passed, tolerance="true") -> Check:
        return Check(cid, crit, anchor, value, tolerance, bool(passed))


# criterion 1: explicit profile
def criterion_1(ctx: Context) -> list[Check]:
    w = ctx.wave
    exact_mass = 2.0 * math.sqrt(5.0) / 5.0
    F = functionals(ctx.grid, w.Phi).F
    return [
        ctx.below("wave.residual", 1, "sech^2 profile solves the fourth-order profile equation at alpha = 4/25",
                  ode_residual(w), "wave_residual"),
        ctx.above("wave.sensitivity", 1, "the same profile fails the equation at alpha = 0.17",
                  ode_residual(w, alpha=0.17), ctx.tol["wave_sensitivity"]),
        ctx.below("wave.mass", 1, "F(Phi) equals the closed form 2 sqrt(5) / 5",
                  F - exact_mass, "mass_closed_form"),
    ]


# criterion 2: kernels
def criterion_2(ctx: Context) -> list[Check]:
    w = ctx.wave
    out = [
        ctx.below("kernel.L1_dphi", 2, "phi' spans the kernel of L1", np.max(np.abs(ctx.op1.apply(w.derivative))),
                  "kernel_residual"),
        ctx.below("kernel.L2_phi", 2, "phi spans the kernel of L2", np.max(np.abs(ctx.op2.apply(w.values))),
                  "kernel_residual"),
    ]
    for name, sp in (("L1", ctx.spec1), ("L2", ctx.spec2)):
        out.append(ctx.equals(f"kernel.{name}_dim", 2, f"the kernel of {name} is one-dimensional", sp.n_zero, 1))
        gap = sp.zero_gap()
        out.append(ctx.holds(f"kernel.{name}_gap", 2, f"the kernel of {name} is isolated from the rest of the spectrum",
                             gap, gap >= ctx.tol["zero_gap"], f">= {_fmt(ctx.tol['zero_gap'])}"))
    ctx.results["spectrum"] = {
        "L1": {"n_negative": ctx.spec1.n_negative, "n_zero": ctx.spec1.n_zero,
               "lowest": ctx.spec1.eigenvalues[:4].tolist()},
        "L2": {"n_negative": ctx.spec2.n_negative, "n_zero": ctx.spec2.n_zero,
               "lowest": ctx.spec2.eigenvalues[:4].tolist()},
    }
    return out


# criterion 3: eigenvalue counts
def _counts(grid: GridSpec):
    w = profile(grid)
    s1 = spectrum(build_operator("L1", grid, w), k=1)
    s2 = spectrum(build_operator("L2", grid, w), k=1)
    return (s1.n_negative, s1.n_zero), (s2.n_negative, s2.n_zero)


def criterion_3(ctx: Context) -> list[Check]:
    s1, s2 = ctx.spec1, ctx.spec2
    g0 = s1.eigenvectors[:, 0]
    g0 = g0 / g0[np.argmax(np.abs(g0))]
    sign_ratio = float(np.min(g0))  # peak normalized to +1
    one_signed = sign_ratio > -1e-10
    # transform with x = 0 moved to index 0, so a real even g has a real transform
    gh = np.fft.fft(np.fft.ifftshift(g0)).real
    fourier_ratio = float(np.min(gh) / np.max(gh))
    out = [
        ctx.equals("counts.L1_negative", 3, "L1 has exactly one negative eigenvalue", s1.n_negative, 1),
        ctx.holds("counts.L1_ground_one_signed", 3, "the negative eigenfunction of L1 has one sign in x",
                  sign_ratio, one_signed, "min/max > -1e-10"),
        ctx.holds("counts.L1_ground_fourier_positive", 3,
                  "the transform of the negative eigenfunction of L1 is positive",
                  fourier_ratio, fourier_ratio > -1e-10, "min/max > -1e-10"),
        ctx.equals("counts.L2_negative", 3, "L2 has no negative eigenvalue", s2.n_negative, 0),
    ]
    base = ((s1.n_negative, s1.n_zero), (s2.n_negative, s2.n_zero))
    g = ctx.grid
    for label, grid in (("refined", g.refined(2)), ("widened", GridSpec(1.5 * g.half_length, 3 * g.n_points // 2))):
        got = _counts(grid)
        out.append(ctx.holds(f"counts.{label}", 3, "negative and zero counts are unchanged on a finer or wider grid",
                             [list(got[0]), list(got[1])], got == base, f"== {[list(base[0]), list(base[1])]}"))
    ctx.results["negative_eigenvalue_L1"] = float(s1.eigenvalues[0])
    return out


# criterion 4: total positivity
def criterion_4(ctx: Context) -> list[Check]:
    f = ctx.freq
    n = ctx.cfg.freq_nodes
    lattice = f.step * np.arange(-n, n + 1)
    pf = pf2_check(rho(lattice), f.step, n_quadruples=ctx.cfg.pf2_quadruples, seed=ctx.cfg.seed)
    out = [
        ctx.holds("totalpos.rho_positive", 4, "rho(xi) = pi xi / sinh(pi xi / 2) is positive", pf.positive, pf.positive),
        ctx.holds("totalpos.rho_log_concave", 4, "rho is log-concave", pf.max_log_second_derivative,
                  pf.log_concave, "< 0"),
        ctx.holds("totalpos.rho_pf2_determinants", 4, "random 2x2 kernel determinants of rho are nonnegative",
                  pf.determinant_violations, pf.determinant_violations == 0, f"== 0 of {pf.n_determinant_checks}"),
    ]
    for which, c in (("L2", "phi^2"), ("L1", "3 phi^2")):
        v = potential_hat(which, f.step, n - 1)
        rep = pf2_check(v, f.step, n_quadruples=ctx.cfg.pf2_quadruples, seed=ctx.cfg.seed)
        out.append(ctx.holds(f"totalpos.{which}_potential_positive", 4, f"the transform of {c} is positive",
                             float(np.min(v)), rep.positive, "> 0"))
        out.append(ctx.holds(f"totalpos.{which}_potential_pf2", 4, f"the transform of {c} passes the PF(2) checks",
                             rep.determinant_violations, rep.passed, "log-concave, 0 violations"))
    return out


# criterion 5: S_theta correspondence
def criterion_5(ctx: Context) -> list[Check]:
    f = ctx.freq
    thetas = np.linspace(0.0, ctx.cfg.theta_max, ctx.cfg.n_theta)
    c2 = eig_curve("L2", thetas, freq=f)
    c1 = eig_curve("L1", thetas, freq=f)
    lam, g = build_stheta("L2", 0.0, f).eig(1)
    ref = phi_hat(f.nodes)
    cos = float(g[:, 0] @ ref / (np.linalg.norm(g[:, 0]) * np.linalg.norm(ref)))
    theta_star = crossing_theta("L1", f)
    kappa = abs(ctx.spec1.eigenvalues[0])
    rel = abs(theta_star - kappa) / kappa
    out = [
        ctx.below("stheta.L2_lambda0", 5, "lambda_0(0) = 1 for the L2 family (zero eigenvalue of L2)",
                  lam[0] - 1.0, "lambda0_L2"),
        ctx.below("stheta.L2_eigvec", 5, "the top eigenfunction of the L2 family at theta = 0 is phi^",
                  1.0 - cos, "cosine"),
        ctx.below("stheta.L1_crossing", 5, "lambda_0(theta*) = 1 at theta* = |negative eigenvalue of L1|",
                  rel, "theta_star_rel"),
    ]
    for name, c in (("L1", c1), ("L2", c2)):
        d = np.diff(c.lambda0)
        out.append(ctx.holds(f"stheta.{name}_decreasing", 5, f"lambda_0(theta) decreases strictly ({name} family)",
                             float(np.max(d)), bool(np.all(d < 0)), "max step < 0"))
        out.append(ctx.holds(f"stheta.{name}_ground_one_signed", 5,
                             f"the top eigenfunction has one sign along the sweep ({name} family)",
                             bool(np.all(c.ground_one_signed)), bool(np.all(c.ground_one_signed))))
    ctx.results["stheta"] = {
        "thetas": thetas.tolist(),
        "lambda0_L1": c1.lambda0.tolist(),
        "lambda0_L2": c2.lambda0.tolist(),
        "theta_star_L1": theta_star,
    }
    return out


# criterion 6: Weinstein quantity
def criterion_6(ctx: Context) -> list[Check]:
    lams = even_eigenvalues("L1", freq=ctx.freq)
    rep = weinstein(ctx.grid, lams)
    na, nb = ctx.cfg.weinstein_N
    Ia = weinstein_direct(GridSpec(ctx.cfg.L, na)).I_direct
    Ib = weinstein_direct(GridSpec(ctx.cfg.L, nb)).I_direct
    out = [
        ctx.holds("weinstein.negative", 6, "I = (chi, phi) with L1 chi = phi is negative", rep.I_direct,
                  rep.I_direct < 0, "< 0"),
        ctx.below("weinstein.refinement", 6, f"I is stable under N = {na} -> {nb}", abs(Ia - Ib) / abs(Ib),
                  "weinstein_refine_rel"),
        ctx.holds("weinstein.series_sign", 6, "the eigenvalue series gives the same sign",
                  rep.I_series, np.sign(rep.I_series) == np.sign(rep.I_direct), "same sign as I_direct"),
        ctx.below("weinstein.series_agreement", 6, "the eigenvalue series agrees with the direct value",
                  abs(rep.I_series - rep.I_direct) / abs(rep.I_direct), "weinstein_series_rel"),
    ]
    ctx.results["weinstein"] = {
        "I_direct": rep.I_direct, "I_series": rep.I_series, f"I_N{na}": Ia, f"I_N{nb}": Ib,
        "series_terms": rep.series_terms, "series_tail_bound": rep.series_tail_bound,
    }
    return out


# criterion 7: coercivity chain
def criterion_7(ctx: Context) -> list[Check]:
    gd = gamma_and_deltas(ctx.problem)
    Z = ctx.z_bound
    aug = ctx.augmented
    eps = ctx.cfg.garding_eps
    certs = [garding_certify(op, eps) for op in (ctx.op1, ctx.op2)]
    C = max(c.C for c in certs)
    out = [
        ctx.below("coercivity.gamma", 7, "inf (L1 v, v) over ||v|| = 1, v orthogonal to phi, is 0", gd["gamma"], "gamma"),
        ctx.above("coercivity.delta_1", 7, "L1 is positive on {phi, phi'}^perp", gd["delta_1"], 0.0),
        ctx.above("coercivity.delta_2", 7, "L2 is positive on {phi}^perp", gd["delta_2"], 0.0),
        ctx.above("coercivity.Z_subspace", 7, "the quadratic form is H2-coercive on the constraint space Z",
                  Z.lambda_min, 0.0),
        ctx.holds("coercivity.calibrated_M", 7, "a finite M makes L + 2M(Phi, .)^2 coercive on {J Phi, Phi'}^perp",
                  [ctx.M, aug.lambda_min], math.isfinite(ctx.M) and aug.lambda_min >= 0.5 * Z.lambda_min,
                  f">= delta/2 = {_fmt(0.5 * Z.lambda_min)}"),
        ctx.holds("coercivity.garding", 7, f"Garding inequality holds at eps = {eps}",
                  C, all(c.valid for c in certs) and C <= ctx.tol["garding_C"], f"<= {_fmt(ctx.tol['garding_C'])}"),
    ]
    ctx.results["coercivity"] = {
        **gd, "Z_lambda_min": Z.lambda_min, "M": ctx.M, "augmented_lambda_min": aug.lambda_min,
        "garding_C": [c.C for c in certs],
    }
    return out


# criterion 8: dynamics
def strang_order_ratio(ctx: Context, t: float = 1.0) -> tuple[float, float, float]:
    exact = np.exp(1j * ALPHA * t) * ctx.wave.Phi
    errs = []
    for dt in (ctx.cfg.dt, ctx.cfg.dt / 2):
        cfg = IntegratorConfig(dt=dt, t_max=t, record_every=10**9)
        u = evolve(ctx.grid, ctx.wave.Phi, cfg).final
        errs.append(float(np.max(np.abs(u - exact))))
    return errs[0] / errs[1], errs[0], errs[1]


def reversibility_error(ctx: Context, t: float = 1.0, delta0: float = 1e-2) -> float:
    rng = np.random.default_rng(ctx.cfg.seed)
    u0 = ctx.wave.Phi + delta0 * random_bandlimited(ctx.grid, rng)
    cfg = IntegratorConfig(dt=ctx.cfg.dt, t_max=t, record_every=10**9)
    u1 = evolve(ctx.grid, u0, cfg).final
    back = evolve(ctx.grid, u1, cfg, backwards=True).final
    return float(np.max(np.abs(back - u0)))


def criterion_8(ctx: Context) -> list[Check]:
    run = ctx.standing_run
    rate = phase_rate(run)
    ratio, e1, e2 = strang_order_ratio(ctx)
    rev = reversibility_error(ctx)
    lo, hi = ctx.tol["order_low"], ctx.tol["order_high"]
    out = [
        ctx.below("dynamics.mass_drift", 8, "F is conserved along the standing-wave run", run.drift("F"), "mass_drift"),
        ctx.below("dynamics.energy_drift", 8, "E is conserved along the standing-wave run", run.drift("E"),
                  "energy_drift"),
        ctx.below("dynamics.phase_rate", 8, "the fitted phase rotates at the rate alpha = 0.16", rate - ALPHA,
                  "phase_rate"),
        ctx.holds("dynamics.strang_order", 8, "Strang splitting is second order", ratio, lo <= ratio <= hi,
                  f"in [{lo}, {hi}]"),
        ctx.below("dynamics.reversibility", 8, "forward then backward integration returns the initial state", rev,
                  "reversibility"),
    ]
    ctx.results["dynamics"] = {"phase_rate": rate, "strang_errors": [e1, e2], "t_max": float(run.times[-1])}
    return out


# criterion 9: orbital stability
def criterion_9(ctx: Context) -> list[Check]:
    q = ctx.quadratic
    sw = ctx.sweep
    runs = sw.runs
    out = [
        ctx.holds("stability.quadratic_bound", 9, "V(v) >= c d(v, orbit)^2 on sampled neighborhood points",
                  q.c_empirical, q.passed, f"c > 0, 0 violations of {q.n_samples}"),
        ctx.holds("stability.bounded", 9, "every perturbed run stays at finite distance without blow-up",
                  [r.sup_d for r in runs], all(math.isfinite(r.sup_d) and not r.blowup for r in runs), "finite"),
        ctx.holds("stability.lyapunov_chain", 9, "c d(U(t), orbit)^2 <= V(U0) at every recorded time",
                  [r.chain_ok for r in runs], all(r.chain_ok for r in runs)),
        ctx.holds("stability.V_drift", 9, "V(U(t)) is conserved along every run",
                  max(r.V_drift for r in runs), max(r.V_drift for r in runs) < ctx.tol["V_drift"],
                  f"< {_fmt(ctx.tol['V_drift'])} relative to |G(Phi)| + M F(Phi)^2"),
        ctx.above("stability.spearman", 9, "sup-distance grows with the perturbation size", sw.spearman(),
                  ctx.tol["spearman"]),
    ]
    at = [r for r in runs if math.isclose(r.delta0, 1e-2)]
    if at:
        out.append(ctx.below("stability.sup_d_1e-2", 9, "a 1e-2 perturbation stays within 0.2 of the orbit",
                             at[0].sup_d, "sup_d_at_1e-2"))
    ctx.results["stability"] = {
        **sw.summary(),
        "quadratic_c": q.c_empirical,
        "rho": q.rho,
        "R": q.R,
    }
    return out


# criterion 10: determinism (cheap re-run in a fresh context)
def criterion_10(ctx: Context) -> list[Check]:
    fresh = Context(ctx.cfg)
    a = [c.as_dict() for c in criterion_1(ctx) + criterion_4(ctx)]
    b = [c.as_dict() for c in criterion_1(fresh) + criterion_4(fresh)]
    same = a == b
    return [ctx.holds("determinism.rerun", 10, "a fresh run with the same config reproduces identical records",
                      same, same)]


# extra checks for the orbit and Lyapunov subcommands
def orbit_checks(ctx: Context) -> list[Check]:
    w, g = ctx.wave, ctx.grid
    fit0 = orbit_distance(w, w.Phi)
    v = orbit_point(w, 0.7, 3.3)
    fit1 = orbit_distance(w, v)
    bump = np.exp(-((g.x / 2.0) ** 2)).astype(complex)
    fit2 = orbit_distance(w, w.Phi + 0.01 * bump)
    rng = np.random.default_rng(ctx.cfg.seed)
    u = w.Phi + 0.02 * random_bandlimited(g, rng)
    d_u = orbit_distance(w, u).distance
    moved = np.exp(-1j * 1.3) * np.fft.ifft(np.fft.fft(u) * np.exp(-1j * g.xi * (-5.0)))
    inv = abs(orbit_distance(w, moved).distance - d_u)
    shifts = np.linspace(-10, 10, 81)
    sep = separation_profile(w, shifts)
    phi_h2 = norm(g, w.values, NormKind.H2) ** 2
    rec = max(abs(fit1.theta - 0.7), abs(fit1.r - 3.3), fit1.distance)
    return [
        ctx.below("orbit.at_Phi", 0, "the distance from Phi to its orbit is 0", fit0.distance, "orbit_recovery"),
        ctx.below("orbit.recovers_point", 0, "an orbit point is recovered with its phase and shift", rec,
                  "orbit_recovery"),
        ctx.holds("orbit.small_bump", 0, "a small even bump is at most its own H2 size away",
                  fit2.distance, fit2.distance <= 0.01 * norm(g, bump, NormKind.H2) * (1 + 1e-12),
                  "<= 0.01 ||bump||_H2"),
        ctx.below("orbit.first_order", 0, "the fitted point satisfies both orthogonality conditions",
                  max(abs(x) for x in fit2.orth_residuals), "orth_residual"),
        ctx.below("orbit.invariance", 0, "the distance is invariant under phase rotation and translation", inv,
                  "orbit_invariance"),
        ctx.holds("orbit.separation", 0, "||Phi - T1(pi/2) T2(r) Phi||^2 >= ||phi||^2 on an r-grid",
                  float(np.min(sep) - phi_h2), bool(np.all(sep >= phi_h2 * (1 - 1e-12))), ">= 0"),
    ]


def lyapunov_checks(ctx: Context) -> list[Check]:
    w, g = ctx.wave, ctx.grid
    V = ctx.lyapunov
    rng = np.random.default_rng(ctx.cfg.seed)
    on_orbit = max(abs(V(orbit_point(w, th, r)).V) for th, r in rng.uniform([-np.pi, -10], [np.pi, 10], (5, 2)))
    grad = numerical_gradient(V, w.Phi, g.spacing)
    q = ctx.quadratic
    delta = ctx.augmented.lambda_min
    target = delta / 4.0
    k = ctx.tol["c_factor"]
    return [
        ctx.below("lyapunov.at_Phi", 0, "V(Phi) = 0", V(w.Phi).V, "lyapunov_zero"),
        ctx.below("lyapunov.on_orbit", 0, "V vanishes on the orbit", on_orbit, "lyapunov_zero"),
        ctx.below("lyapunov.gradient", 0, "V'(Phi) = 0 (central differences)", grad, "lyapunov_gradient"),
        ctx.holds("lyapunov.quadratic", 0, "V >= c d^2 with c > 0 on the sampled neighborhood",
                  q.c_empirical, q.passed, "c > 0"),
        ctx.below("lyapunov.symmetry_pairings", 0, "<V'(v), Jv> = <V'(v), v_x> = 0", q.max_symmetry_pairing,
                  "symmetry_pairing"),
        ctx.holds("lyapunov.c_vs_delta", 0, "the empirical c is within a factor 4 of delta/4",
                  q.c_empirical, target / k <= q.c_empirical <= target * k,
                  f"in [{_fmt(target / k)}, {_fmt(target * k)}]"),
    ]


def numerical_gradient(V: Lyapunov, u: np.ndarray, h: float, eps: float = 1e-4) -> float:
    """max-norm of the L2 gradient of V at u by central differences in each nodal value."""
    g = 0.0
    base = np.asarray(u, dtype=complex)
    for j in range(base.size):
        for unit in (1.0, 1j):
            up, dn = base.copy(), base.copy()
            up[j] += eps * unit
            dn[j] -= eps * unit
            d = (V(up).V - V(dn).V) / (2 * eps * h)
            g = max(g, abs(d))
    return g


CRITERIA: dict[int, Callable[[Context], list[Check]]] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}
