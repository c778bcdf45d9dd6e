import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from herzlab import Ball, Measure, ball_growth_report, ball_mass, satisfies_ball_growth
from herzlab.errors import InvalidArgumentError
from herzlab.measure import annulus_mass, default_balls

LEB = Measure.lebesgue()
betas = st.floats(0.05, 1.0)
reals = st.floats(-50.0, 50.0)
radii = st.floats(1e-4, 1e3)


def test_ball_mass_examples():
    assert ball_mass(LEB, Ball(0.0, 3.0)) == 6.0
    assert ball_mass(Measure.power_weight(0.5), Ball(2.0, 2.0)) == pytest.approx(4.0, rel=1e-15)
    assert ball_mass(Measure.power_weight(1.0), Ball(-1.0, 0.5)) == 0.0


def test_ball_mass_two_dimensional_lebesgue():
    assert ball_mass(Measure.lebesgue(2), Ball((1.0, 2.0), 2.0)) == pytest.approx(4 * math.pi)


def test_annulus_mass_examples():
    assert annulus_mass(LEB, 0) == 1.0
    assert annulus_mass(LEB, 1) == 2.0
    assert annulus_mass(Measure.power_weight(1.0), 1) == 1.0


@given(st.integers(-30, 30), betas)
def test_annulus_mass_is_set_algebra(t, beta):
    mu = Measure.power_weight(beta)
    lo, hi = 2.0 ** (t - 1), 2.0 ** t
    direct = ball_mass(mu, Ball(0.5 * (lo + hi), 0.5 * (hi - lo)))
    assert annulus_mass(mu, t) == pytest.approx(direct, rel=1e-12)


def test_dimension_mismatch_is_rejected():
    with pytest.raises(InvalidArgumentError):
        ball_mass(LEB, Ball((0.0, 0.0), 1.0))


@pytest.mark.parametrize("kw", [dict(n=2, kind="power_weight", beta=0.5),
                                dict(kind="power_weight", beta=0.0),
                                dict(kind="power_weight"),
                                dict(kind="lebesgue", beta=0.5),
                                dict(kind="gaussian")])
def test_invalid_measures(kw):
    with pytest.raises(InvalidArgumentError):
        Measure(**kw)


def test_ball_radius_must_be_positive():
    with pytest.raises(InvalidArgumentError):
        Ball(0.0, 0.0)


@given(betas, reals, reals, st.floats(0.0, 1.0))
def test_additivity(beta, a, b, frac):
    a, b = min(a, b), max(a, b)
    if b - a < 1e-6:
        return
    c = a + frac * (b - a)
    for m in (LEB, Measure.power_weight(beta)):
        whole = m.interval_mass(a, b)
        parts = m.interval_mass(a, c) + m.interval_mass(c, b)
        assert parts == pytest.approx(whole, rel=1e-12, abs=1e-300)
        assert whole >= 0.0


@given(reals, reals)
def test_beta_one_is_lebesgue_on_the_half_line(a, b):
    a, b = min(a, b), max(a, b)
    mu = Measure.power_weight(1.0)
    assert mu.interval_mass(a, b) == max(b, 0.0) - max(a, 0.0)


def test_origin_balls_have_constant_ratio():
    beta = 0.75
    rep = ball_growth_report(Measure.power_weight(beta), beta,
                             [Ball(0.0, 2.0 ** k) for k in range(-10, 11)])
    expected = 1.0 / (beta * 2.0 ** beta)
    assert np.allclose(rep.ratios, expected, rtol=1e-12, atol=0)


def test_lebesgue_ratio_is_identically_one():
    rep = ball_growth_report(LEB, 1.0, default_balls())
    assert np.allclose(rep.ratios, 1.0, rtol=1e-14)


def test_sup_is_attained_by_balls_containing_the_origin():
    beta = 0.5
    balls = default_balls() + [Ball(r, r) for r in 2.0 ** np.arange(-10, 11)]
    rep = ball_growth_report(Measure.power_weight(beta), beta, balls)
    c, r = rep.argmax_ball.center[0], rep.argmax_ball.radius
    assert c - r <= 0.0 < c + r
    # balls (0, 2r) are the extremals: mu = (2r)^beta / beta
    assert rep.sup_ratio == pytest.approx(1.0 / beta, rel=1e-12)


@given(betas, st.lists(st.tuples(reals, radii), min_size=1, max_size=30))
def test_random_ball_sup_is_at_most_one_over_beta(beta, pairs):
    rep = ball_growth_report(Measure.power_weight(beta), beta, [Ball(c, r) for c, r in pairs])
    assert rep.sup_ratio <= (1.0 / beta) * (1 + 1e-12)


def test_growth_report_errors():
    with pytest.raises(InvalidArgumentError):
        ball_growth_report(LEB, 1.0, [])
    with pytest.raises(InvalidArgumentError):
        ball_growth_report(LEB, 0.0, [Ball(0.0, 1.0)])


def test_satisfies_ball_growth():
    assert satisfies_ball_growth(LEB, 1.0)
    assert not satisfies_ball_growth(LEB, 0.75)
    assert satisfies_ball_growth(Measure.power_weight(0.75), 0.75)
    assert not satisfies_ball_growth(Measure.power_weight(0.75), 0.5)
    assert not satisfies_ball_growth(Measure.power_weight(1.5), 1.5)


def test_config_round_trip():
    for m in (LEB, Measure.lebesgue(2), Measure.power_weight(0.3)):
        assert Measure.from_config(m.to_config()) == m
