"""Tests for the logistic wind-shear profile."""

import math

import numpy as np
import pytest

from dsoar.windfield import WindParams, wind_gradient, wind_rate, wind_speed

P = WindParams(w0=7.8, delta=7.0)


def test_midpoint_is_half_free_stream():
    assert wind_speed(0.0, P) == pytest.approx(3.9, abs=1e-12)


def test_saturates_to_free_stream_aloft():
    assert wind_speed(1e4, P) == pytest.approx(7.8, abs=1e-12)
    assert wind_speed(-1e4, P) == pytest.approx(0.0, abs=1e-12)


def test_speed_at_one_layer_thickness():
    # 7.8 / (1 + e^-1), evaluated by hand
    assert wind_speed(7.0, P) == pytest.approx(7.8 / (1.0 + math.exp(-1.0)), rel=1e-12)
    assert wind_speed(7.0, P) == pytest.approx(5.7022569, abs=5e-7)


def test_gradient_closed_form_values():
    assert wind_gradient(0.0, P) == pytest.approx(7.8 / (4.0 * 7.0), rel=1e-12)
    assert wind_gradient(10.0, P) == pytest.approx(0.173771, abs=5e-7)
    assert wind_gradient(500.0, P) == pytest.approx(0.0, abs=1e-12)
    assert wind_gradient(-500.0, P) == pytest.approx(0.0, abs=1e-12)


def test_gradient_matches_finite_difference_of_speed():
    step = 1e-4 * P.delta
    for z in np.linspace(-5.0 * P.delta, 5.0 * P.delta, 41):
        fd = (wind_speed(z + step, P) - wind_speed(z - step, P)) / (2.0 * step)
        assert wind_gradient(z, P) == pytest.approx(fd, rel=1e-6)


def test_monotone_and_bounded():
    zs = np.linspace(-60.0, 60.0, 301)
    ws = [wind_speed(z, P) for z in zs]
    assert all(0.0 < w < P.w0 for w in ws)
    assert all(b >= a for a, b in zip(ws, ws[1:]))


def test_thin_layer_approaches_step_profile():
    # for delta <= |z|/50 the profile is a step to 1e-9
    for z in (1.0, -1.0, 3.0, -3.0):
        thin = WindParams(w0=7.8, delta=abs(z) / 50.0)
        target = 7.8 if z > 0 else 0.0
        assert abs(wind_speed(z, thin) - target) <= 1e-9


def test_wind_rate_chain_rule_value():
    assert wind_rate(10.0, 14.0, 0.6, P) == pytest.approx(
        wind_gradient(10.0, P) * 14.0 * math.sin(0.6), rel=1e-14)
    assert wind_rate(10.0, 14.0, 0.6, P) == pytest.approx(1.3736578, abs=5e-7)


def test_wind_rate_zero_cases():
    assert wind_rate(5.0, 14.0, 0.0, P) == 0.0
    assert wind_rate(5.0, 0.0, 0.6, P) == 0.0


def test_wind_rate_odd_in_gamma():
    rng = np.random.default_rng(7)
    for _ in range(25):
        z = rng.uniform(-20, 20)
        v = rng.uniform(1, 25)
        g = rng.uniform(-1.4, 1.4)
        assert wind_rate(z, v, -g, P) == pytest.approx(-wind_rate(z, v, g, P),
                                                       rel=1e-13, abs=1e-15)


def test_parameter_validation():
    with pytest.raises(ValueError, match="delta"):
        WindParams(w0=7.8, delta=0.0)
    with pytest.raises(ValueError, match="w0"):
        WindParams(w0=-1.0, delta=7.0)


def test_nonfinite_altitude_rejected():
    with pytest.raises(ValueError):
        wind_speed(math.nan, P)
    with pytest.raises(ValueError):
        wind_gradient(math.inf, P)
    with pytest.raises(ValueError):
        wind_rate(0.0, math.nan, 0.1, P)


def test_extreme_altitude_does_not_overflow():
    assert wind_speed(-1e7, P) == 0.0
    assert wind_speed(1e7, P) == P.w0
    assert wind_gradient(1e7, P) == 0.0
