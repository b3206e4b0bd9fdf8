"""Extremum-seeking roll-rate control for the soaring glider.

The controller is the control-affine extremum-seeking law

    u(t, x) = b1(J(x)) * u1(t) + b2(J(x)) * u2(t),

with the particular gain pair `b1 = J`, `b2 = 1` and zero-mean sinusoidal
dithers

    u1(t) = a cos(omega t + mu),      u2(t) = b sin(omega t).

`J` is the wind energy-gain rate per unit weight,

    J = -V * Wdot * cos(gamma) * sin(psi) / g,

the only term in the specific-energy rate that exchanges energy with the
wind (the other term is pure drag loss).  The controller reads nothing but
`J`: in flight the same number is available from airspeed/altitude-rate
sensing, so the loop is model-free in the usual extremum-seeking sense.

:func:`scalar_esc_demo` runs the one-dimensional version of the same loop,
`xdot = J(x) sqrt(omega) cos(omega t) + sqrt(omega) sin(omega t)` with a
quadratic cost, which settles into a bounded orbit around the optimum and
is handy for seeing the mechanism without any flight dynamics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .flight_dynamics import BirdWindParams, FlightState
from .windfield import wind_rate


@dataclass(frozen=True)
class EscParams:
    """Dither amplitudes `a`, `b` (rad/s), frequency `omega` (rad/s), phase `mu`."""

    a: float = 2.1
    b: float = 0.8
    omega: float = 5.8
    mu: float = 0.55

    def __post_init__(self):
        for name in ("a", "b", "omega", "mu"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.omega <= 0.0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega


@dataclass(frozen=True)
class DitherPair:
    """The two dither samples `(u1, u2)` at one instant, rad/s."""

    u1: float
    u2: float


def dither_signals(t: float, e: EscParams) -> DitherPair:
    """Dither samples `u1 = a cos(omega t + mu)`, `u2 = b sin(omega t)`.

    Both are periodic with period `2 pi / omega` and have zero mean over
    one period.
    """
    return DitherPair(u1=e.a * math.cos(e.omega * t + e.mu),
                      u2=e.b * math.sin(e.omega * t))


def objective_from_components(z, v, gamma, psi, p: BirdWindParams):
    """Energy-gain objective from raw state components (dual-safe)."""
    wdot = wind_rate(z, v, gamma, p.wind)
    return -v * wdot * ad.cos(gamma) * ad.sin(psi) / p.g


def objective_energy_gain(s: FlightState, p: BirdWindParams) -> float:
    """Wind energy-gain rate per unit weight, `-V Wdot cos(gamma) sin(psi) / g`."""
    return float(objective_from_components(s.z, s.v, s.gamma, s.psi, p))


def esc_control(t: float, s: FlightState, e: EscParams,
                p: BirdWindParams) -> float:
    """Roll-rate command `u = J(x) u1(t) + u2(t)` (rad/s)."""
    d = dither_signals(t, e)
    return objective_energy_gain(s, p) * d.u1 + d.u2


def scalar_esc_demo(x0: float, x_star: float = 1.0, omega: float = 50.0,
                    t_end: float = 10.0, h: float = 1e-4):
    """Integrate the scalar extremum-seeking loop toward `x_star`.

    Dynamics: `xdot = J(x) sqrt(omega) cos(omega t) + sqrt(omega) sin(omega t)`
    with `J(x) = 2 (x - x_star)^2`, integrated with fixed-step RK4.  Returns
    `(times, xs)` as arrays.  The averaged dynamics descend the cost, so the
    trajectory converges to a dither-sized orbit around `x_star`.

    Raises `FloatingPointError` naming the blow-up time if the state leaves
    the representable range (it should not, for sane parameters).
    """
    if omega <= 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    if h <= 0.0 or t_end <= 0.0:
        raise ValueError("h and t_end must be positive")

    root_w = math.sqrt(omega)

    def deriv(t, x):
        j = 2.0 * (x - x_star) ** 2
        return j * root_w * math.cos(omega * t) + root_w * math.sin(omega * t)

    n = int(round(t_end / h))
    times = np.empty(n + 1)
    xs = np.empty(n + 1)
    times[0], xs[0] = 0.0, float(x0)
    x = float(x0)
    for k in range(n):
        t = k * h
        k1 = deriv(t, x)
        k2 = deriv(t + 0.5 * h, x + 0.5 * h * k1)
        k3 = deriv(t + 0.5 * h, x + 0.5 * h * k2)
        k4 = deriv(t + h, x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not math.isfinite(x):
            raise FloatingPointError(
                f"scalar ESC state diverged at t = {(k + 1) * h:.6g} s"
            )
        times[k + 1] = (k + 1) * h
        xs[k + 1] = x
    return times, xs
