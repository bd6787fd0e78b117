import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from f4nls.grid import GridSpec, NormKind, derivative, inner, integrate, make_grid, norm, translate


def gauss(x, s=2.0):
    return np.exp(-((x / s) ** 2))


def test_nodes_and_frequencies():
    g = make_grid(10.0, 64)
    assert g.spacing == pytest.approx(20.0 / 64)
    assert g.x[0] == -10.0 and g.x[-1] == pytest.approx(10.0 - g.spacing)
    assert g.xi[1] == pytest.approx(np.pi / 10.0)
    assert g.h2_weight[0] == 1.0


@pytest.mark.parametrize("L, N", [(0.0, 64), (-1.0, 64), (10.0, 63), (10.0, 8)])
def test_invalid_grid(L, N):
    with pytest.raises(ValueError):
        GridSpec(L, N)


def test_refined_and_widened_keep_box_or_spacing():
    g = make_grid()
    assert g.refined().n_points == 2048 and g.refined().half_length == 96.0
    w = g.widened(1.5)
    assert (w.half_length, w.n_points) == (144.0, 1536)
    assert w.spacing == pytest.approx(g.spacing)


def test_derivatives_match_analytic_gaussian():
    g = make_grid(20.0, 256)
    x, f = g.x, gauss(g.x)
    exact = {
        1: -x / 2 * f,
        2: (x**2 / 4 - 0.5) * f,
        3: (-(x**3) / 8 + 3 * x / 4) * f,
        4: (x**4 / 16 - 3 * x**2 / 4 + 0.75) * f,
    }
    for k, ref in exact.items():
        assert np.max(np.abs(derivative(g, f, k) - ref)) < 1e-10


def test_fourth_derivative_against_finite_differences():
    # independent oracle: 7-point central stencil, O(h^4)
    g = make_grid(20.0, 512)
    f = gauss(g.x, 3.0)
    h = g.spacing
    fd = (
        -np.roll(f, 3) + 12 * np.roll(f, 2) - 39 * np.roll(f, 1) + 56 * f
        - 39 * np.roll(f, -1) + 12 * np.roll(f, -2) - np.roll(f, -3)
    ) / (6 * h**4)
    assert np.max(np.abs(derivative(g, f, 4) - fd)) < 50 * h**4


def test_odd_derivative_of_real_field_is_real():
    g = make_grid(10.0, 64)
    out = derivative(g, np.cos(g.x * np.pi / 10), 3)
    assert out.dtype == np.float64


def test_derivative_rejects_bad_order_and_shape():
    g = make_grid(10.0, 64)
    with pytest.raises(ValueError):
        derivative(g, np.zeros(64), 5)
    with pytest.raises(ValueError):
        derivative(g, np.zeros(32), 1)


def test_h2_norm_matches_physical_space_formula():
    g = make_grid(20.0, 512)
    f = gauss(g.x)
    direct = integrate(g, f**2 + derivative(g, f, 1) ** 2 + derivative(g, f, 2) ** 2)
    assert norm(g, f, NormKind.H2) ** 2 == pytest.approx(direct, rel=1e-12)


def test_l2_norm_of_gaussian():
    g = make_grid(20.0, 256)
    assert norm(g, gauss(g.x)) ** 2 == pytest.approx(np.sqrt(2 * np.pi), rel=1e-12)


def test_complex_inner_product_is_real_part():
    g = make_grid(10.0, 64)
    f = gauss(g.x) * (1 + 2j)
    h = gauss(g.x) * (3 - 1j)
    assert inner(g, f, h) == pytest.approx(integrate(g, gauss(g.x) ** 2) * (3 - 2))


def test_reflect():
    g = make_grid(10.0, 64)
    f = np.sin(np.pi * g.x / 10) + np.sin(3 * np.pi * g.x / 10)
    assert np.allclose(g.reflect(f), -f, atol=1e-13)
    assert np.allclose(g.reflect(np.cos(np.pi * g.x / 5)), np.cos(np.pi * g.x / 5), atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(r=st.floats(-5, 5), s=st.floats(0.8, 3.0))
def test_translation_preserves_norms_and_shifts(r, s):
    g = make_grid(30.0, 256)
    f = gauss(g.x, s)
    t = translate(g, f, r)
    assert np.max(np.abs(t - gauss(g.x - r, s))) < 1e-10
    for kind in NormKind:
        assert norm(g, t, kind) == pytest.approx(norm(g, f, kind), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_inner_product_properties(seed):
    g = make_grid(10.0, 64)
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    h = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    for kind in NormKind:
        assert inner(g, f, h, kind) == pytest.approx(inner(g, h, f, kind), rel=1e-12, abs=1e-12)
    assert norm(g, f, NormKind.H2) >= norm(g, f)


def test_spacing_and_top_frequency():
    assert make_grid(64.0, 2048).spacing == 0.0625
    g = make_grid(1.0, 16)
    assert np.max(np.abs(g.xi)) == pytest.approx(np.pi * 8)
    with pytest.raises(ValueError):
        make_grid(64.0, 15)


def test_derivative_of_sine_and_constant():
    g = make_grid(7.0, 128)
    f = np.sin(np.pi * g.x / 7.0)
    assert np.max(np.abs(derivative(g, f, 1) - np.pi / 7.0 * np.cos(np.pi * g.x / 7.0))) < 1e-12
    for k in (1, 2, 3, 4):
        assert np.max(np.abs(derivative(g, np.full(128, 2.5), k))) < 1e-12


def test_wave_fourth_derivative_against_eighth_order_stencil(grid, wave):
    # 9-point central stencil, O(h^6)
    c = np.array([7, -96, 676, -1952, 2730, -1952, 676, -96, 7]) / 240.0
    f, h = wave.values, grid.spacing
    fd = sum(ck * np.roll(f, 4 - k) for k, ck in enumerate(c)) / h**4
    interior = np.abs(grid.x) < 0.9 * grid.half_length
    err = np.max(np.abs(derivative(grid, f, 4) - fd)[interior])
    assert err < 20 * h**6


def test_wave_inner_products(grid, wave):
    assert abs(inner(grid, wave.values, wave.derivative)) < 1e-12
    assert inner(grid, wave.values, wave.values) == pytest.approx(4 * np.sqrt(5) / 5, abs=1e-10)


def test_translate_identity_and_inverse(wave, grid, rng):
    f = np.fft.ifft(np.where(np.abs(grid.xi) < 2, rng.standard_normal(grid.n_points), 0)).real
    assert np.array_equal(translate(grid, f, 0.0), f)
    assert np.max(np.abs(translate(grid, translate(grid, f, 2.3), -2.3) - f)) < 1e-12
    assert norm(grid, translate(grid, wave.values, 3.7)) == pytest.approx(norm(grid, wave.values), abs=1e-12)
