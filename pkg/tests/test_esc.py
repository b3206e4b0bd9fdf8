"""Tests for the extremum-seeking controller and the scalar demo."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from dsoar.esc import (
    EscParams,
    dither_signals,
    esc_control,
    objective_energy_gain,
    scalar_esc_demo,
)
from dsoar.flight_dynamics import BirdWindParams, FlightState
from dsoar.windfield import wind_rate

E = EscParams()  # a=2.1, b=0.8, omega=5.8, mu=0.55
P8 = BirdWindParams(cl_fixed=0.8)
X0 = FlightState(0.0, 0.0, 10.0, 14.0, 0.6, 1.4, -0.1)


def test_dither_values_at_zero():
    d = dither_signals(0.0, E)
    assert d.u1 == pytest.approx(2.1 * math.cos(0.55), rel=1e-14)
    assert d.u1 == pytest.approx(1.7903015, abs=5e-7)
    assert d.u2 == 0.0


def test_dither_zero_mean_over_one_period():
    # quadrature oracle for the periodic averages
    for pick in (lambda t: dither_signals(t, E).u1,
                 lambda t: dither_signals(t, E).u2):
        integral, _ = quad(pick, 0.0, E.period, limit=200)
        assert abs(integral) <= 1e-10 * E.period


def test_dither_periodicity():
    for t in np.linspace(0.0, 3.0, 17):
        d0 = dither_signals(t, E)
        d1 = dither_signals(t + E.period, E)
        assert d1.u1 == pytest.approx(d0.u1, abs=1e-12)
        assert d1.u2 == pytest.approx(d0.u2, abs=1e-12)


def test_dither_bounded_by_amplitudes():
    for t in np.linspace(0.0, 10.0, 500):
        d = dither_signals(t, E)
        assert abs(d.u1) <= E.a + 1e-12
        assert abs(d.u2) <= E.b + 1e-12


def test_objective_closed_form_at_reference_state():
    j = objective_energy_gain(X0, P8)
    wdot = wind_rate(10.0, 14.0, 0.6, P8.wind)
    assert j == pytest.approx(-14.0 * wdot * math.cos(0.6) * math.sin(1.4) / 9.8,
                              rel=1e-14)
    assert j == pytest.approx(-1.5960466, abs=5e-7)


def test_objective_zero_cases():
    level = FlightState(0, 0, 10, 14, 0.0, 1.4, -0.1)
    assert objective_energy_gain(level, P8) == 0.0
    north = FlightState(0, 0, 10, 14, 0.6, 0.0, -0.1)
    assert objective_energy_gain(north, P8) == 0.0


def test_objective_sign_opposes_climb_heading_product():
    # J > 0 exactly when sin(gamma) * sin(psi) < 0 under positive shear
    rng = np.random.default_rng(5)
    for _ in range(50):
        s = FlightState(0, 0, rng.uniform(-10, 30), rng.uniform(5, 25),
                        rng.uniform(-1.2, 1.2), rng.uniform(-6, 6),
                        rng.uniform(-1, 1))
        j = objective_energy_gain(s, P8)
        product = math.sin(s.gamma) * math.sin(s.psi)
        if abs(product) > 1e-12:
            assert math.copysign(1.0, j) == -math.copysign(1.0, product)


def test_control_combines_objective_and_dithers():
    u = esc_control(0.0, X0, E, P8)
    j = objective_energy_gain(X0, P8)
    assert u == pytest.approx(j * 2.1 * math.cos(0.55), rel=1e-14)
    assert u == pytest.approx(-2.8574047, abs=5e-7)


def test_control_reduces_to_u2_when_objective_vanishes():
    level = FlightState(0, 0, 10, 14, 0.0, 1.4, -0.1)
    for t in (0.1, 0.4, 0.9):
        assert esc_control(t, level, E, P8) == pytest.approx(
            0.8 * math.sin(5.8 * t), rel=1e-14)


def test_control_is_affine_in_objective():
    # doubling J doubles u - u2
    t = 0.37
    d = dither_signals(t, E)
    j = objective_energy_gain(X0, P8)
    u = esc_control(t, X0, E, P8)
    assert u - d.u2 == pytest.approx(j * d.u1, rel=1e-13)


def test_control_bound():
    rng = np.random.default_rng(9)
    for _ in range(40):
        s = FlightState(0, 0, rng.uniform(-10, 30), rng.uniform(5, 25),
                        rng.uniform(-1.2, 1.2), rng.uniform(-6, 6),
                        rng.uniform(-1, 1))
        t = rng.uniform(0, 10)
        j = objective_energy_gain(s, P8)
        assert abs(esc_control(t, s, E, P8)) <= abs(j) * E.a + E.b + 1e-12


def test_esc_params_validation():
    with pytest.raises(ValueError, match="omega"):
        EscParams(omega=0.0)
    with pytest.raises(ValueError):
        EscParams(a=math.nan)


def test_scalar_demo_starting_at_optimum_stays_bounded():
    times, xs = scalar_esc_demo(1.0, omega=50.0, t_end=4.0, h=1e-4)
    # u2's running integral swings x by up to 2/sqrt(omega) above the optimum
    assert np.max(np.abs(xs - 1.0)) < 0.5


def test_scalar_demo_converges_from_offset_starts():
    for x0 in (0.0, 3.0):
        times, xs = scalar_esc_demo(x0, omega=50.0, t_end=10.0, h=1e-4)
        tail = xs[times >= times[-1] - 1.0]
        assert np.max(np.abs(tail - 1.0)) <= 0.2


def test_scalar_demo_validation():
    with pytest.raises(ValueError):
        scalar_esc_demo(0.0, omega=0.0)
    with pytest.raises(ValueError):
        scalar_esc_demo(0.0, h=-1.0)
