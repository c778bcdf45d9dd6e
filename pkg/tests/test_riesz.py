import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy.special import gamma as Gamma

from herzlab import PiecewisePowerFunction as PPF
from herzlab.errors import DivergenceError, InvalidArgumentError, SingularityError
from herzlab.experiments.applications import fourier_symbol_check, semigroup_check
from herzlab.riesz import (GridFunction, PotentialFunction, RieszParams, direct_grid_potential,
                           fractional_laplace_solve, gaussian_grid, grid_from_function,
                           normalization_constant, riesz_kernel, riesz_potential_1d,
                           riesz_potential_grid, spectral_potential)

from oracles import indicator_potential, power_convolution

gammas = st.floats(0.05, 0.95)


def P(g, n=1):
    return RieszParams(g, n)


# -- kernel --------------------------------------------------------------------


def test_kernel_examples():
    assert riesz_kernel(4.0, P(0.5)) == 0.5
    assert riesz_kernel([3.0, 4.0], P(1.0, 2)) == pytest.approx(0.2, rel=1e-15)
    assert riesz_kernel(1.0, P(0.9)) == 1.0


def test_kernel_singular_at_origin():
    with pytest.raises(SingularityError):
        riesz_kernel(0.0, P(0.5))
    with pytest.raises(SingularityError):
        riesz_kernel([0.0, 0.0], P(1.0, 2))


def test_kernel_dimension_mismatch():
    with pytest.raises(InvalidArgumentError):
        riesz_kernel([1.0, 2.0], P(0.5))


@pytest.mark.parametrize("g,n", [(0.0, 1), (1.0, 1), (-0.2, 1), (2.0, 2), (0.5, 0)])
def test_params_range(g, n):
    with pytest.raises(InvalidArgumentError):
        RieszParams(g, n)


# -- exact 1D evaluator ----------------------------------------------------------


@pytest.mark.parametrize("g", [0.1, 0.25, 0.5, 0.9])
def test_centered_indicator(g):
    assert riesz_potential_1d(PPF.indicator(-1, 1), P(g), 0.0) == pytest.approx(2 / g, rel=1e-12)


def test_indicator_examples():
    f = PPF.indicator(0, 1)
    assert riesz_potential_1d(f, P(0.5), 2.0) == pytest.approx(2 * (math.sqrt(2) - 1), rel=1e-12)
    # each side of the split at x contributes 2 * 0.5^(1/2) = sqrt(2)
    assert riesz_potential_1d(f, P(0.5), 0.5) == pytest.approx(2 * math.sqrt(2), rel=1e-12)
    assert indicator_potential(0.0, 0.5, 0.5, 0.5) == pytest.approx(math.sqrt(2), rel=1e-14)


def test_vectorized_matches_scalar():
    f = PPF([(-2, -1, 1.5, 0.0), (0, 3, 1.0, -0.3)])
    x = np.array([-3.0, -1.5, 0.0, 0.7, 2.5, 9.0])
    v = riesz_potential_1d(f, P(0.4), x)
    assert v.shape == x.shape
    for xi, vi in zip(x, v):
        assert riesz_potential_1d(f, P(0.4), float(xi)) == pytest.approx(vi, rel=1e-14)


@given(a=st.floats(-5, 4), w=st.floats(0.01, 5), g=gammas, x=st.floats(-8, 8))
def test_indicator_against_antiderivative(a, w, g, x):
    b = a + w
    want = indicator_potential(a, b, g, x)
    got = riesz_potential_1d(PPF.indicator(a, b), P(g), x)
    assert got == pytest.approx(want, rel=1e-10, abs=1e-13)


@given(a=st.floats(0.0, 3.0), w=st.floats(0.1, 4.0), s=st.floats(-0.9, 1.5), g=gammas,
       x=st.floats(-6, 8))
def test_power_piece_against_quadpack(a, w, s, g, x):
    b = a + w
    # stay off the piece endpoints, where the oracle's weight split degenerates
    assume(min(abs(x - a), abs(x - b)) > 1e-3)
    want = power_convolution(a, b, s, g, x)
    got = riesz_potential_1d(PPF.power(a, b, s), P(g), x)
    assert got == pytest.approx(want, rel=1e-8)


@given(s=st.floats(-0.9, 1.0), g=gammas, x=st.floats(-3, 3))
def test_negative_side_mirrors_positive(s, g, x):
    f = PPF.power(0.5, 2.0, s)
    m = PPF.power(-2.0, -0.5, s)
    assert riesz_potential_1d(m, P(g), -x) == pytest.approx(riesz_potential_1d(f, P(g), x), rel=1e-12)


def test_singular_power_at_origin():
    f = PPF.symmetric_power(0.0, 1.0, -0.5)
    assert riesz_potential_1d(f, P(0.75), 0.0) == pytest.approx(8.0, rel=1e-10)
    with pytest.raises(DivergenceError):
        riesz_potential_1d(f, P(0.4), 0.0)


def test_unbounded_tail():
    # integral_1^inf y^-1.5 y^-0.7 dy = 1 / 1.2
    f = PPF.power(1.0, math.inf, -1.5)
    assert riesz_potential_1d(f, P(0.3), 0.0) == pytest.approx(1 / 1.2, rel=1e-10)
    with pytest.raises(DivergenceError):
        riesz_potential_1d(PPF.power(1.0, math.inf, -0.5), P(0.7), 0.0)
    with pytest.raises(DivergenceError):
        riesz_potential_1d(PPF.indicator(0.0, math.inf), P(0.5), 0.0)


def test_requires_one_dimension():
    with pytest.raises(InvalidArgumentError):
        riesz_potential_1d(PPF.indicator(0, 1), P(1.0, 2), 0.0)


def test_zero_function():
    assert riesz_potential_1d(PPF.zero(), P(0.5), 1.3) == 0.0


@given(a=st.floats(-3, 3), w=st.floats(0.05, 3), s=st.floats(-0.9, 1.0), g=gammas,
       x=st.floats(-5, 5))
def test_positivity(a, w, s, g, x):
    f = PPF.power(max(a, 0.0), max(a, 0.0) + w, s) if s < 0 else PPF.power(a, a + w, s)
    assert riesz_potential_1d(f, P(g), x) > 0


@given(a=st.floats(-3, 3), w=st.floats(0.05, 3), c=st.floats(-4, 4), g=gammas, x=st.floats(-5, 5))
def test_translation_invariance(a, w, c, g, x):
    lhs = riesz_potential_1d(PPF.indicator(a + c, a + w + c), P(g), x + c)
    rhs = riesz_potential_1d(PPF.indicator(a, a + w), P(g), x)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)


@given(a=st.floats(-3, 3), w=st.floats(0.05, 3), s=st.floats(0.2, 5), g=gammas, x=st.floats(-3, 3))
def test_dilation_law(a, w, s, g, x):
    # f_s(y) = f(s y) for f = chi_(a, a + w)
    fs = PPF.indicator(a / s, (a + w) / s)
    lhs = riesz_potential_1d(fs, P(g), x)
    rhs = s ** -g * riesz_potential_1d(PPF.indicator(a, a + w), P(g), s * x)
    assert lhs == pytest.approx(rhs, rel=1e-8)


@given(s=st.floats(0.2, 5), p=st.floats(-0.9, 1.0), g=gammas, x=st.floats(-3, 3))
def test_dilation_law_power(s, p, g, x):
    # (|y|^p chi_(0,1))(s y) = s^p |y|^p chi_(0, 1/s)
    fs = PPF.power(0.0, 1.0 / s, p, coef=s ** p)
    lhs = riesz_potential_1d(fs, P(g), x)
    rhs = s ** -g * riesz_potential_1d(PPF.power(0.0, 1.0, p), P(g), s * x)
    assert lhs == pytest.approx(rhs, rel=1e-8)


@given(g=gammas, x=st.floats(-4, 4), c1=st.floats(-3, 3), c2=st.floats(-3, 3))
def test_linearity_exact(g, x, c1, c2):
    f = PPF([(0, 1, c1, -0.3)])
    h = PPF([(2, 3, c2, 0.0)])
    both = PPF([(0, 1, c1, -0.3), (2, 3, c2, 0.0)])
    want = riesz_potential_1d(f, P(g), x) + riesz_potential_1d(h, P(g), x)
    assert riesz_potential_1d(both, P(g), x) == pytest.approx(want, rel=1e-12, abs=1e-12)


# -- normalization ---------------------------------------------------------------


def test_normalization_examples():
    assert normalization_constant(P(0.5)) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-14)
    assert normalization_constant(P(1.0, 2)) == pytest.approx(2 * math.pi, rel=1e-14)
    assert normalization_constant(P(2.0, 3)) == pytest.approx(4 * math.pi, rel=1e-14)


@given(g=st.floats(0.05, 2.95), n=st.integers(1, 3))
def test_normalization_formula(g, n):
    assume(g < n)
    want = math.pi ** (n / 2) * 2 ** g * Gamma(g / 2) / Gamma((n - g) / 2)
    assert normalization_constant(P(g, n)) == pytest.approx(want, rel=1e-12)


# -- grids -----------------------------------------------------------------------


def _index_of(grid, x):
    return int(round((x - grid.origin[0]) / grid.h))


def test_grid_indicator_against_exact():
    h = 2.0 ** -10
    f = grid_from_function(PPF.indicator(-1, 1), -4.0, 4.0, h)
    u = riesz_potential_grid(f, P(0.5))
    i = _index_of(f, 0.0)
    want = riesz_potential_1d(PPF.indicator(-1, 1), P(0.5), 0.0)
    assert abs(u.samples[i] / want - 1) <= 1e-3


def test_grid_gaussian_at_origin_1d():
    # integral |y|^(g-1) exp(-y^2/2) dy = 2^(g/2) Gamma(g/2)
    g = 0.5
    f = gaussian_grid(1, half_width=12.0, h=1 / 64)
    u = riesz_potential_grid(f, P(g))
    assert u.samples[_index_of(f, 0.0)] == pytest.approx(2 ** (g / 2) * Gamma(g / 2), rel=1e-3)


def test_grid_gaussian_at_origin_2d():
    # 2 pi integral_0^inf exp(-r^2/2) dr = pi sqrt(2 pi)
    f = gaussian_grid(2, half_width=8.0, h=1 / 16)
    u = riesz_potential_grid(f, P(1.0, 2))
    c = _index_of(f, 0.0)
    assert u.samples[c, c] == pytest.approx(math.pi * math.sqrt(2 * math.pi), rel=1e-2)
    assert np.allclose(u.samples, u.samples.T, rtol=1e-12)


def test_zero_grid():
    f = GridFunction((-1.0,), 0.1, np.zeros(21))
    u = riesz_potential_grid(f, P(0.5))
    assert np.all(u.samples == 0.0)
    assert "warning" not in u.metadata


def test_grid_linearity():
    f = gaussian_grid(1, half_width=8.0, h=1 / 32)
    x = f.coords()
    g = f.with_samples(np.exp(-(x - 1.0) ** 2) * np.cos(x))
    lhs = riesz_potential_grid(f + g, P(0.3)).samples
    rhs = riesz_potential_grid(f, P(0.3)).samples + riesz_potential_grid(g, P(0.3)).samples
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(rhs))


def test_grid_matches_direct_sum():
    f = grid_from_function(lambda x: np.exp(-x * x), -5.0, 5.0, 1 / 16)
    u = riesz_potential_grid(f, P(0.4))
    x = f.axes()[0][::37]
    d = direct_grid_potential(f, P(0.4), x)
    assert np.allclose(u.samples[::37], d, rtol=1e-11)


def test_boundary_warning():
    f = GridFunction((0.0,), 0.1, np.ones(32))
    u = riesz_potential_grid(f, P(0.5))
    assert "warning" in u.metadata
    assert np.all(np.isfinite(u.samples))


def test_grid_dimension_mismatch():
    with pytest.raises(InvalidArgumentError):
        riesz_potential_grid(gaussian_grid(1, 2.0, 0.25), P(1.0, 2))


@pytest.mark.parametrize("bad", [np.ones(3), np.ones((4, 3)), np.ones((2, 2, 2))])
def test_grid_validation(bad):
    with pytest.raises(InvalidArgumentError):
        GridFunction((0.0,) * bad.ndim, 0.1, bad)


def test_grid_spacing_positive():
    with pytest.raises(InvalidArgumentError):
        GridFunction((0.0,), 0.0, np.ones(8))


@pytest.mark.parametrize("n", [1, 2])
def test_bytes_round_trip(n, tmp_path):
    rng = np.random.default_rng(7)
    shape = (9,) if n == 1 else (5, 7)
    f = GridFunction((-1.25,) * n, 0.375, rng.standard_normal(shape))
    g = GridFunction.from_bytes(f.to_bytes())
    assert g.origin == f.origin and g.h == f.h
    assert np.array_equal(g.samples, f.samples)
    f.save(tmp_path / "g.bin")
    assert np.array_equal(GridFunction.load(tmp_path / "g.bin").samples, f.samples)


def test_bytes_layout():
    f = GridFunction((0.5,), 0.25, np.arange(4.0))
    b = f.to_bytes()
    assert len(b) == 8 + 8 + 8 + 8 + 4 * 8
    assert int.from_bytes(b[:8], "little") == 1
    assert int.from_bytes(b[8:16], "little") == 4


def test_csv_round_trip(tmp_path):
    f = GridFunction((-1.0, 0.0), 0.5, np.arange(20.0).reshape(4, 5) / 3)
    f.to_csv(tmp_path / "g.csv")
    rows = np.loadtxt(tmp_path / "g.csv", delimiter=",", skiprows=1)
    X, Y = f.coords()
    assert np.array_equal(rows[:, 0], X.ravel())
    assert np.array_equal(rows[:, 1], Y.ravel())
    assert np.array_equal(rows[:, 2], f.samples.ravel())


# -- fractional Laplacian ----------------------------------------------------------


def test_solve_is_scaled_potential_grid():
    f = gaussian_grid(1, half_width=8.0, h=1 / 32)
    p = P(0.5)
    u = fractional_laplace_solve(f, p)
    want = riesz_potential_grid(f, p).samples / normalization_constant(p)
    assert np.allclose(u.samples, want, rtol=1e-14)


def test_solve_is_scaled_potential_exact():
    f = PPF([(-1, 2, 1.0, 0.0), (3, 4, 2.0, -0.5)])
    p = P(0.7)
    u = fractional_laplace_solve(f, p)
    assert isinstance(u, PotentialFunction)
    x = np.linspace(-3, 6, 11)
    assert np.allclose(u(x), riesz_potential_1d(f, p, x) / normalization_constant(p), rtol=1e-14)


def test_solve_zero():
    f = GridFunction((0.0,), 0.1, np.zeros(16))
    assert np.all(fractional_laplace_solve(f, P(0.5)).samples == 0.0)
    assert np.all(fractional_laplace_solve(PPF.zero(), P(0.5))(np.linspace(-1, 1, 5)) == 0.0)


def test_solve_rejects_other_carriers():
    with pytest.raises(InvalidArgumentError):
        fractional_laplace_solve(np.ones(8), P(0.5))


def test_spectral_route_gaussian():
    g = 0.5
    f = gaussian_grid(1, half_width=12.0, h=1 / 32)
    v = spectral_potential(f, P(g), [0.0])[0]
    assert v == pytest.approx(2 ** (g / 2) * Gamma(g / 2), rel=1e-6)


def test_fourier_symbol_identity():
    assert fourier_symbol_check(0.5).max_rel_error <= 1e-2


def test_normalized_semigroup():
    assert semigroup_check(0.25, 0.25).max_rel_error <= 1e-2


@pytest.mark.parametrize("x", [1e-5, 1e-20, 1e-100, 3.5e-302])
def test_near_coincident_singularities(x):
    # integral_0^1 y^-1/2 |x - y|^-1/2 dy = pi + 2 log((1 + sqrt(1 - x)) / sqrt(x))
    want = math.pi + 2 * math.log((1 + math.sqrt(1 - x)) / math.sqrt(x))
    got = riesz_potential_1d(PPF.power(0.0, 1.0, -0.5), P(0.5), x)
    assert got == pytest.approx(want, rel=1e-12)
