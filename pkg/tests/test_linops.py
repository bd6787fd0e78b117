import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from f4nls.grid import NormKind, derivative, make_grid, norm
from f4nls.linops import (
    build_operator,
    complement_basis,
    constrained_min,
    garding_certify,
    h2_matrix,
    matrix_operator_min,
    multiplier_matrix,
    spectrum,
    symbol,
)
from f4nls.wave import ALPHA, profile

# values computed once on the default grid (L = 96, N = 1024) and frozen
KAPPA = -0.45351613964
DELTA_1 = 0.146209888
DELTA_2 = 0.158262743


def test_matrix_is_symmetric_and_matches_fft_action(ctx, rng):
    for op in (ctx.op1, ctx.op2):
        A = op.matrix
        assert np.array_equal(A, A.T)
        v = rng.standard_normal(A.shape[0])
        assert np.max(np.abs(A @ v - op.apply(v))) < 1e-10


def test_multiplier_matrix_reproduces_derivatives():
    g = make_grid(20.0, 128)
    f = np.exp(-(g.x**2) / 4)
    D4 = multiplier_matrix(g, g.xi**4)
    assert np.max(np.abs(D4 @ f - derivative(g, f, 4))) < 1e-10
    assert np.max(np.abs(multiplier_matrix(g, symbol(g)) @ f - derivative(g, f, 4) + derivative(g, f, 2))) < 1e-10


def test_h2_matrix_gives_h2_norm(rng):
    g = make_grid(10.0, 64)
    v = np.exp(-g.x**2) * rng.uniform(0.5, 1.5)
    assert g.spacing * v @ h2_matrix(g) @ v == pytest.approx(norm(g, v, NormKind.H2) ** 2, rel=1e-12)


def test_unknown_operator():
    g = make_grid(10.0, 64)
    with pytest.raises(ValueError):
        build_operator("L3", g, profile(g))


def test_kernels(ctx):
    w = ctx.wave
    assert np.max(np.abs(ctx.op1.apply(w.derivative))) < 1e-9
    assert np.max(np.abs(ctx.op2.apply(w.values))) < 1e-9
    assert np.max(np.abs(ctx.op2.matrix @ w.values)) < 1e-9


def test_spectral_counts(ctx):
    s1, s2 = ctx.spec1, ctx.spec2
    assert (s1.n_negative, s1.n_zero) == (1, 1)
    assert (s2.n_negative, s2.n_zero) == (0, 1)
    assert s1.eigenvalues[0] == pytest.approx(KAPPA, abs=1e-9)
    assert s1.zero_gap() > 1e-2 and s2.zero_gap() > 1e-2
    assert np.all(s1.residuals < 1e-10)
    assert s1.essential_edge == ALPHA


def test_negative_eigenvalue_resolution_independent(ctx):
    # the same eigenvalue from a finer and from a wider grid
    for g in (ctx.grid.refined(2), ctx.grid.widened(1.5)):
        s = spectrum(build_operator("L1", g, profile(g)), k=1)
        assert s.eigenvalues[0] == pytest.approx(KAPPA, abs=1e-9)


def test_ground_state_tail_oscillates_but_transform_is_positive(ctx):
    # At lambda = kappa the decay rates mu solve mu^4 - mu^2 + alpha - kappa = 0.
    # Its discriminant 1 - 4 (alpha - kappa) is negative, so mu is complex and
    # the x-space tail must oscillate; positivity holds on the Fourier side.
    assert 1 - 4 * (ALPHA - KAPPA) < 0
    g0 = ctx.spec1.eigenvectors[:, 0]
    g0 = g0 / g0[np.argmax(np.abs(g0))]
    assert np.min(g0) == pytest.approx(-5.393e-4, rel=1e-3)
    gh = np.fft.fft(np.fft.ifftshift(g0)).real
    assert np.min(gh) > -1e-12 * np.max(gh)
    # sign change sits where the predicted oscillation puts it
    mu = np.sqrt(np.roots([1, -1, ALPHA - KAPPA]).astype(complex))
    mu = mu[mu.real > 0][0]
    x_neg = ctx.grid.x[np.argmin(g0)]
    assert abs(abs(x_neg) - np.pi / abs(mu.imag)) < 0.6 * np.pi / abs(mu.imag)


def test_complement_basis():
    rng = np.random.default_rng(0)
    c = [rng.standard_normal(20), rng.standard_normal(20)]
    Z = complement_basis(c, 20)
    assert Z.shape == (20, 18)
    assert np.allclose(Z.T @ Z, np.eye(18))
    assert np.max(np.abs(np.column_stack(c).T @ Z)) < 1e-13
    with pytest.raises(ValueError):
        complement_basis([c[0], 2 * c[0]], 20)
    assert complement_basis([], 5).shape == (5, 5)


def _projector_oracle(A, constraints, shift=100.0):
    # independent route: eigh of P A P + shift (I - P) with P the orthogonal projector
    C = np.column_stack(constraints)
    P = np.eye(A.shape[0]) - C @ np.linalg.solve(C.T @ C, C.T)
    return sla.eigh(P @ A @ P + shift * (np.eye(A.shape[0]) - P), eigvals_only=True, subset_by_index=[0, 0])[0]


def test_constrained_minima(ctx):
    w = ctx.wave
    d1, v1 = constrained_min(ctx.op1, [w.values, w.derivative])
    d2, _ = constrained_min(ctx.op2, [w.values])
    gamma, _ = constrained_min(ctx.op1, [w.values])
    assert d1 == pytest.approx(DELTA_1, abs=1e-8)
    assert d2 == pytest.approx(DELTA_2, abs=1e-8)
    assert abs(gamma) < 5e-6
    assert d1 == pytest.approx(_projector_oracle(ctx.op1.matrix, [w.values, w.derivative]), abs=1e-10)
    assert d2 == pytest.approx(_projector_oracle(ctx.op2.matrix, [w.values]), abs=1e-10)
    # minimizer is unit, admissible and attains the value
    h = ctx.grid.spacing
    assert norm(ctx.grid, v1) == pytest.approx(1.0)
    assert abs(h * v1 @ w.values) < 1e-10
    assert ctx.op1.form(v1) == pytest.approx(d1, abs=1e-10)


def test_block_minimum_matches_blockwise_minima(small_grid):
    w = profile(small_grid)
    op1, op2 = build_operator("L1", small_grid, w), build_operator("L2", small_grid, w)
    joint = matrix_operator_min(op1, op2, [w.values, w.derivative], [w.values])
    sep = min(constrained_min(op1, [w.values, w.derivative])[0], constrained_min(op2, [w.values])[0])
    assert joint == pytest.approx(sep, abs=1e-10)


def test_h2_constrained_min(small_grid):
    w = profile(small_grid)
    op = build_operator("L2", small_grid, w)
    lam, v = constrained_min(op, [w.values], norm=NormKind.H2)
    assert norm(small_grid, v, NormKind.H2) == pytest.approx(1.0)
    assert op.form(v) == pytest.approx(lam, abs=1e-10)
    assert 0 < lam < DELTA_2


def test_garding(ctx, rng):
    cert = garding_certify(ctx.op1, 0.5)
    assert cert.valid and cert.C <= 1.24
    assert cert.C == pytest.approx(1.018465, abs=2e-6)
    g = ctx.grid
    H = h2_matrix(g)
    # the inequality holds for random vectors and fails just below C at the worst vector
    for _ in range(20):
        v = rng.standard_normal(g.n_points)
        assert v @ ctx.op1.matrix @ v >= 0.5 * v @ H @ v - cert.C * v @ v - 1e-9
    B = ctx.op1.matrix - 0.5 * H + (cert.C - 1e-3) * np.eye(g.n_points)
    assert sla.eigh(B, eigvals_only=True, subset_by_index=[0, 0])[0] < 0
    assert garding_certify(ctx.op2, 0.5).C < cert.C


@pytest.mark.parametrize("eps", [0.0, 1.0, 1.5, -0.1])
def test_garding_rejects_eps(ctx, eps):
    with pytest.raises(ValueError):
        garding_certify(ctx.op1, eps)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_quadratic_form_symmetry(seed):
    g = make_grid(20.0, 64)
    op = build_operator("L1", g, profile(g))
    rng = np.random.default_rng(seed)
    v, w = rng.standard_normal(64), rng.standard_normal(64)
    assert op.form(v, w) == pytest.approx(op.form(w, v), rel=1e-10, abs=1e-10)


def test_free_operator(small_grid):
    w = profile(small_grid)
    op = build_operator("L1", small_grid, w, potential=np.zeros(small_grid.n_points))
    lam = sla.eigh(op.matrix, eigvals_only=True)
    assert lam.min() >= ALPHA - 1e-12
    cert = garding_certify(op, 0.5)
    assert cert.valid and cert.C <= 0.5 - ALPHA + 2e-6


def test_unconstrained_block_minimum_is_negative_eigenvalue(small_grid):
    w = profile(small_grid)
    op1, op2 = build_operator("L1", small_grid, w), build_operator("L2", small_grid, w)
    lam = sla.eigh(op1.matrix, eigvals_only=True, subset_by_index=[0, 0])[0]
    assert matrix_operator_min(op1, op2) == pytest.approx(lam, abs=1e-10)
    assert lam < 0
