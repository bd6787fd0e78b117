"""Command-line front end: one subcommand per capability plus ``report-all``.

Every subcommand builds a run configuration (defaults, then ``--config``,
then flags), evaluates its checks and emits a JSON report with sorted keys.
Exit codes: 0 all checks pass, 1 a check failed, 2 usage error,
3 numerical abort.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .checks import (
    CRITERIA,
    Context,
    RunConfig,
    _jsonable,
    criterion_2,
    lyapunov_checks,
    orbit_checks,
    parse_config,
)
from .coercivity import KernelMismatchError, MCalibrationError
from .dynamics import BlowUpError, dump_field, evolve, load_field, write_trajectory_csv
from .linops import EigensolverError
from .orbit import orbit_distance, orbit_monitor

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

NUMERICAL_ERRORS = (
    BlowUpError,
    EigensolverError,
    KernelMismatchError,
    MCalibrationError,
    np.linalg.LinAlgError,
    FloatingPointError,
)


class UsageError(Exception):
    pass


def build_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        cfg = parse_config(text, cfg)
    over = {}
    if args.grid_L is not None:
        over["L"] = args.grid_L
    if args.grid_N is not None:
        over["N"] = args.grid_N
    if args.dt is not None:
        over["dt"] = args.dt
    if args.tmax is not None:
        over["stability_t_max" if args.command == "stability" else "t_max"] = args.tmax
    if args.seed is not None:
        over["seed"] = args.seed
    return replace(cfg, **over)


def make_report(command: str, ctx: Context, checks, extra: dict | None = None) -> dict:
    recs = [c.as_dict() for c in checks]
    results = dict(ctx.results)
    if extra:
        results.update(extra)
    return {
        "schema": SCHEMA_VERSION,
        "command": command,
        "status": "pass" if all(r["passed"] for r in recs) else "fail",
        "checks": recs,
        "results": _jsonable(results),
        "config": _jsonable(ctx.cfg.as_dict()),
        "provenance": {
            "config_sha256": ctx.cfg.sha256(),
            "version": __version__,
            "numpy": np.__version__,
        },
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


# subcommand bodies: each returns (checks, extra results)
def run_verify_wave(ctx, args):
    return CRITERIA[1](ctx), {}


def run_spectrum(ctx, args):
    which = args.op.upper()
    checks = [c for c in criterion_2(ctx) if which in c.check_id]
    sp = ctx.spec1 if which == "L1" else ctx.spec2
    expected = 1 if which == "L1" else 0
    checks.append(ctx.equals(f"counts.{which}_negative", 3, f"number of negative eigenvalues of {which}",
                             sp.n_negative, expected))
    extra = {
        "op": which,
        "n_negative": sp.n_negative,
        "n_zero": sp.n_zero,
        "lowest": sp.eigenvalues[:6].tolist(),
        "essential_edge": sp.essential_edge,
    }
    ctx.results.pop("spectrum", None)
    return checks, extra


def run_totalpos(ctx, args):
    return CRITERIA[4](ctx) + CRITERIA[5](ctx), {}


def run_weinstein(ctx, args):
    return CRITERIA[6](ctx), {}


def run_coercivity(ctx, args):
    return CRITERIA[7](ctx), {}


def run_evolve(ctx, args):
    if args.init:
        grid, u0 = load_field(args.init)
        if (grid.half_length, grid.n_points) != (ctx.grid.half_length, ctx.grid.n_points):
            raise UsageError(f"{args.init} holds a field on L={grid.half_length}, N={grid.n_points}; "
                             f"pass matching --grid-L/--grid-N")
        checks = []
    else:
        u0 = ctx.wave.Phi
        checks = CRITERIA[8](ctx)
    traj = evolve(ctx.grid, u0, ctx.integrator(), monitor=orbit_monitor(ctx.wave, ctx.lyapunov))
    if args.init:
        for name, key in (("F", "mass_drift"), ("E", "energy_drift")):
            checks.append(ctx.below(f"dynamics.{name}_drift", 8, f"{name} is conserved along the run",
                                    traj.drift(name), key))
    out = Path(args.out) if args.out else None
    files = {}
    if args.csv:
        path = (out or Path(".")) / "trajectory.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        write_trajectory_csv(traj, path)
        files["trajectory_csv"] = path.name
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        dump_field(out / "final.field", ctx.grid, traj.final)
        files["final_field"] = "final.field"
    extra = {
        "evolve": {
            "t_final": float(traj.times[-1]),
            "E_drift": traj.drift("E"),
            "F_drift": traj.drift("F"),
            "sup_d": float(np.max(traj.d)),
            "files": files,
        }
    }
    return checks, extra


def run_orbit_fit(ctx, args):
    if args.field:
        grid, u = load_field(args.field)
        if (grid.half_length, grid.n_points) != (ctx.grid.half_length, ctx.grid.n_points):
            raise UsageError(f"{args.field} holds a field on L={grid.half_length}, N={grid.n_points}")
        fit = orbit_distance(ctx.wave, u)
        checks = [
            ctx.holds("orbit.converged", 0, "the shift refinement converged", fit.converged, fit.converged),
            ctx.below("orbit.first_order", 0, "the fitted point satisfies both orthogonality conditions",
                      max(abs(x) for x in fit.orth_residuals), "orth_residual"),
        ]
        extra = {"fit": {"theta": fit.theta, "r": fit.r, "distance": fit.distance,
                         "orth_residuals": list(fit.orth_residuals)}}
        return checks, extra
    return orbit_checks(ctx), {}


def run_lyapunov(ctx, args):
    checks = lyapunov_checks(ctx)
    q = ctx.quadratic
    extra = {"lyapunov": {"M": ctx.M, "c": q.c_empirical, "rho": q.rho, "R": q.R, "n_samples": q.n_samples}}
    return checks, extra


def run_stability(ctx, args):
    checks = CRITERIA[9](ctx)
    if args.csv:
        ctx.sweep.write(Path(args.out) if args.out else Path("."))
    return checks, {}


def run_report_all(ctx, args):
    checks = []
    for k in sorted(CRITERIA):
        checks += CRITERIA[k](ctx)
    checks += orbit_checks(ctx) + lyapunov_checks(ctx)
    if args.csv:
        ctx.sweep.write(Path(args.out) if args.out else Path("."))
    return checks, {}


COMMANDS = {
    "verify-wave": (run_verify_wave, "residual of the explicit sech^2 profile"),
    "spectrum": (run_spectrum, "dense spectrum of L1 or L2: kernel and negative count"),
    "totalpos": (run_totalpos, "PF(2) checks and the S_theta eigenvalue curves"),
    "weinstein": (run_weinstein, "the quantity (chi, phi) with L1 chi = phi, direct and by series"),
    "coercivity": (run_coercivity, "constrained minima, calibrated M and the Garding constant"),
    "evolve": (run_evolve, "time integration with conservation and orbit diagnostics"),
    "orbit-fit": (run_orbit_fit, "modulation fit and orbital distance"),
    "lyapunov": (run_lyapunov, "Lyapunov functional checks near the orbit"),
    "stability": (run_stability, "perturbation sweep with orbital distance tracking"),
    "report-all": (run_report_all, "every check in one report"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid-L", type=float, help="half-length of the periodic box")
    common.add_argument("--grid-N", type=int, help="number of grid points (even)")
    common.add_argument("--dt", type=float, help="time step")
    common.add_argument("--tmax", type=float, help="final time (the sweep horizon for 'stability')")
    common.add_argument("--seed", type=int, help="seed for randomized checks")
    common.add_argument("--config", metavar="PATH", help="flat key=value config file")
    common.add_argument("--out", metavar="DIR", help="write the JSON report (and data files) here")
    common.add_argument("--json", action="store_true", help="print the JSON report to stdout")
    common.add_argument("--csv", action="store_true", help="write CSV data files (trajectories, sweeps)")

    p = argparse.ArgumentParser(prog="f4nls", description="Orbital stability checks for the fourth-order NLS standing wave.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_, description=help_)
        if name == "spectrum":
            sp.add_argument("--op", choices=["l1", "l2"], default="l1")
        if name == "evolve":
            sp.add_argument("--init", metavar="PATH", help="initial field dump (default: the standing wave)")
        if name == "orbit-fit":
            sp.add_argument("--field", metavar="PATH", help="field dump to fit (default: built-in cases)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
    except (UsageError, ValueError) as exc:
        print(f"f4nls: {exc}", file=sys.stderr)
        return EXIT_USAGE
    ctx = Context(cfg)
    runner = COMMANDS[args.command][0]
    saved = np.seterr(over="raise", invalid="raise")
    try:
        checks, extra = runner(ctx, args)
    except UsageError as exc:
        print(f"f4nls: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NUMERICAL_ERRORS as exc:
        print(f"f4nls: numerical abort: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    finally:
        np.seterr(**saved)

    report = make_report(args.command, ctx, checks, extra)
    text = dumps(report)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.command}.json").write_text(text)
    if args.json:
        sys.stdout.write(text)
    else:
        for r in report["checks"]:
            print(f"{'PASS' if r['passed'] else 'FAIL'}  {r['check_id']}: {r['value']} ({r['tolerance']})")
        print(f"status: {report['status']}")
    for r in report["checks"]:
        if not r["passed"]:
            print(f"f4nls: check failed: {r['check_id']} value={r['value']} tolerance {r['tolerance']}",
                  file=sys.stderr)
    return EXIT_OK if report["status"] == "pass" else EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
