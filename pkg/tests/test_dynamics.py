import struct

import numpy as np
import pytest

import f4nls.dynamics as dyn
from f4nls.dynamics import (
    CSV_COLUMNS,
    BlowUpError,
    IntegratorConfig,
    dump_field,
    evolve,
    load_field,
    phase_rate,
    step,
    write_trajectory_csv,
)
from f4nls.grid import translate
from f4nls.orbit import orbit_monitor, random_bandlimited
from f4nls.wave import ALPHA, functionals, profile


def test_config_validation():
    assert IntegratorConfig(dt=0.01, t_max=1.0).n_steps == 100
    for kw in ({"dt": 0.0}, {"dt": 1.0, "t_max": 0.5}, {"record_every": 0}, {"scheme": "rk4"}):
        with pytest.raises(ValueError):
            IntegratorConfig(**kw)


def test_standing_wave_and_order(grid, wave):
    exact = np.exp(1j * ALPHA) * wave.Phi
    errs = []
    for dt in (2e-3, 1e-3, 5e-4):
        u = evolve(grid, wave.Phi, IntegratorConfig(dt=dt, t_max=1.0, record_every=10**6)).final
        errs.append(np.max(np.abs(u - exact)))
    assert errs[1] < 1e-8
    for a, b in zip(errs, errs[1:]):
        assert 3.6 <= a / b <= 4.4


def test_single_step_matches_evolve(small_grid):
    w = profile(small_grid)
    u1 = step(small_grid, w.Phi, 1e-3)
    u2 = evolve(small_grid, w.Phi, IntegratorConfig(dt=1e-3, t_max=1e-3, record_every=1)).final
    assert np.max(np.abs(u1 - u2)) < 1e-15


def test_conservation_and_phase_rate(small_grid, rng):
    w = profile(small_grid)
    cfg = IntegratorConfig(dt=1e-3, t_max=5.0, record_every=250)
    tr = evolve(small_grid, w.Phi, cfg, monitor=orbit_monitor(w))
    assert tr.drift("F") < 1e-12 and tr.drift("E") < 1e-10
    assert phase_rate(tr) == pytest.approx(ALPHA, abs=1e-6)
    assert np.max(tr.d) < 1e-6
    with pytest.raises(ValueError):
        phase_rate(evolve(small_grid, w.Phi, cfg))
    with pytest.raises(AttributeError):
        tr.nonexistent


def test_mass_exactly_conserved_for_perturbed_state(small_grid, rng):
    u0 = profile(small_grid).Phi + 0.05 * random_bandlimited(small_grid, rng)
    tr = evolve(small_grid, u0, IntegratorConfig(dt=2e-3, t_max=2.0, record_every=100))
    assert tr.drift("F") < 1e-12
    assert tr.drift("E") < 1e-7


def test_reversibility(small_grid, rng):
    u0 = profile(small_grid).Phi + 0.02 * random_bandlimited(small_grid, rng)
    cfg = IntegratorConfig(dt=1e-3, t_max=1.0, record_every=10**6)
    u1 = evolve(small_grid, u0, cfg).final
    back = evolve(small_grid, u1, cfg, backwards=True).final
    assert np.max(np.abs(back - u0)) < 1e-8


@pytest.mark.parametrize("theta, r", [(0.4, 2.5), (-1.1, -7.0)])
def test_equivariance(small_grid, rng, theta, r):
    u0 = profile(small_grid).Phi + 0.05 * random_bandlimited(small_grid, rng)
    cfg = IntegratorConfig(dt=2e-3, t_max=0.5, record_every=10**6)
    sym = lambda u: np.exp(-1j * theta) * translate(small_grid, u, r)
    a = evolve(small_grid, sym(u0), cfg).final
    b = sym(evolve(small_grid, u0, cfg).final)
    assert np.max(np.abs(a - b)) < 1e-11


def test_blowup_guard(small_grid, monkeypatch):
    monkeypatch.setattr(dyn, "BLOWUP_THRESHOLD", 0.1)
    with pytest.raises(BlowUpError):
        evolve(small_grid, profile(small_grid).Phi, IntegratorConfig(dt=1e-2, t_max=0.1, record_every=5))


def test_field_roundtrip(tmp_path, small_grid, rng):
    u = random_bandlimited(small_grid, rng)
    p = tmp_path / "u.field"
    dump_field(p, small_grid, u)
    raw = p.read_bytes()
    assert len(raw) == 20 + 16 * small_grid.n_points
    magic, n, L = struct.unpack("<8sId", raw[:20])
    assert (magic, n, L) == (b"F4NLSFLD", small_grid.n_points, small_grid.half_length)
    g2, u2 = load_field(p)
    assert g2 == small_grid and np.array_equal(u2, u)


def test_field_errors(tmp_path, small_grid):
    p = tmp_path / "bad.field"
    p.write_bytes(b"NOTFIELD" + bytes(12))
    with pytest.raises(ValueError):
        load_field(p)
    dump_field(p, small_grid, np.zeros(small_grid.n_points, complex))
    p.write_bytes(p.read_bytes()[:-16])
    with pytest.raises(ValueError):
        load_field(p)
    with pytest.raises(ValueError):
        dump_field(p, small_grid, np.zeros(3))


def test_trajectory_csv(tmp_path, small_grid):
    w = profile(small_grid)
    tr = evolve(small_grid, w.Phi, IntegratorConfig(dt=1e-2, t_max=0.2, record_every=5), monitor=orbit_monitor(w))
    p = tmp_path / "t.csv"
    write_trajectory_csv(tr, p)
    lines = p.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + len(tr.times)
    row = lines[-1].split(",")
    assert row[CSV_COLUMNS.index("V")] == ""  # no Lyapunov monitor attached
    assert float(row[CSV_COLUMNS.index("F")]) == pytest.approx(functionals(small_grid, w.Phi).F)


def test_zero_state_stays_zero(small_grid):
    z = np.zeros(small_grid.n_points, dtype=complex)
    assert not np.any(step(small_grid, z, 0.1))


@pytest.mark.parametrize("k", [1, 5, 40])
def test_single_mode_phase_is_exact(small_grid, k):
    # |u| is constant, so the nonlinear substeps add exactly exp(i eps^2 dt)
    g, eps, dt = small_grid, 0.3, 0.01
    xi = g.xi[k]
    u0 = eps * np.exp(1j * xi * g.x)
    u1 = step(g, u0, dt)
    exact = u0 * np.exp(-1j * (xi**2 + xi**4) * dt + 1j * eps**2 * dt)
    assert np.max(np.abs(u1 - exact)) < 1e-13


def test_slightly_heavier_wave_runs(small_grid):
    w = profile(small_grid)
    tr = evolve(small_grid, 1.01 * w.Phi, IntegratorConfig(dt=2e-3, t_max=5.0, record_every=500))
    assert np.all(np.isfinite(tr.final)) and tr.drift("F") < 1e-12


def test_shifted_wave_keeps_shift_and_rate(small_grid):
    w = profile(small_grid)
    r0 = 2.5
    tr = evolve(small_grid, translate(small_grid, w.Phi, r0),
                IntegratorConfig(dt=1e-3, t_max=2.0, record_every=100), monitor=orbit_monitor(w))
    assert np.max(np.abs(tr.extra["r"] - r0)) < 1e-6
    assert phase_rate(tr) == pytest.approx(ALPHA, abs=1e-5)


def test_rate_error_scales_with_dt_squared(small_grid):
    w = profile(small_grid)
    err = []
    for dt in (1e-2, 2e-2):
        cfg = IntegratorConfig(dt=dt, t_max=4.0, record_every=int(round(0.2 / dt)))
        err.append(phase_rate(evolve(small_grid, w.Phi, cfg, monitor=orbit_monitor(w))) - ALPHA)
    assert 3.6 <= err[1] / err[0] <= 4.4
