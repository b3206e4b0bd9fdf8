"""Point-mass glider dynamics in wind shear, in control-affine form.

State is the 7-vector `(x, y, z, V, gamma, psi, phi)`: east/north position
and altitude in an Earth-fixed East-North-Up frame, airspeed, flight-path
angle (nose up positive), heading (from east toward north), and roll angle.
Speed and angles are relative to the moving air; the wind blows from north
to south, so it enters the inertial `y` rate and, through its along-path
rate `Wdot`, the airspeed and angle rates.

With the lift coefficient held fixed and the roll rate as the only input,
the equations of motion split as

    xdot = f(x) + b * u,      b = (0, 0, 0, 0, 0, 0, 1),  phidot = u.

The drift `f` is:

    xdot     = V cos(gamma) cos(psi)
    ydot     = V cos(gamma) sin(psi) - W
    zdot     = V sin(gamma)
    Vdot     = (-D - m g sin(gamma) + sgn * m Wdot cos(gamma) sin(psi)) / m
    gammadot = (L cos(phi) - m g cos(gamma) - m Wdot sin(gamma) sin(psi)) / (m V)
    psidot   = (L sin(phi) + m Wdot cos(psi)) / (m V cos(gamma))
    phidot   = 0

`sgn` is the wind-coupling sign on the airspeed row (see
:data:`WIND_COUPLING_SIGNS`).  The default `+1` matches the other rows'
convention; `-1` flips the sign of the wind's work on the airspeed, which
is the convention implied by the energy-rate decomposition some analyses
use.  Both are runnable so the choice stays auditable.

The model divides by `m V` and `m V cos(gamma)`, so it is only valid for
`V > 0` and `|gamma| < pi/2`; states near those boundaries raise
:class:`SingularStateError` rather than returning garbage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import autodiff as ad
from .windfield import WindParams, wind_rate, wind_speed

# valid values for the wind-coupling sign on the Vdot row
WIND_COUPLING_SIGNS = (+1, -1)

# states closer than this to V = 0 or cos(gamma) = 0 are rejected
SINGULARITY_TOL = 1e-6


class SingularStateError(ValueError):
    """Raised when the dynamics are evaluated too close to V=0 or |gamma|=pi/2."""


def check_wind_coupling_sign(sign) -> int:
    """Validate and normalize the wind-coupling sign to +1 or -1."""
    if sign not in WIND_COUPLING_SIGNS:
        raise ValueError(f"wind coupling sign must be +1 or -1, got {sign!r}")
    return int(sign)


@dataclass(frozen=True)
class FlightState:
    """Glider state `(x, y, z, v, gamma, psi, phi)` in SI units and radians.

    Angles are stored unwrapped (no mod 2*pi): the heading accumulates
    continuously through turns.
    """

    x: float
    y: float
    z: float
    v: float
    gamma: float
    psi: float
    phi: float

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not math.isfinite(value):
                raise ValueError(f"state field {name} must be finite, got {value}")
        if self.v <= 0.0:
            raise ValueError(f"airspeed must be positive, got {self.v}")
        if abs(self.gamma) >= math.pi / 2:
            raise ValueError(
                f"flight-path angle must satisfy |gamma| < pi/2, got {self.gamma}"
            )

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.v,
                         self.gamma, self.psi, self.phi])

    @classmethod
    def from_array(cls, arr) -> "FlightState":
        x, y, z, v, gamma, psi, phi = (float(a) for a in arr)
        return cls(x, y, z, v, gamma, psi, phi)


@dataclass(frozen=True)
class BirdWindParams:
    """Vehicle and environment constants for an albatross-class glider.

    Defaults are the albatross values used throughout: mass 9.5 kg, wing
    area 0.65 m^2, parabolic drag polar `C_D = cd0 + k_induced * C_L^2`,
    sea-level density, and a 7.8 m/s logistic shear layer of thickness 7 m.

    `cl_fixed` is the constant lift coefficient flown.  When omitted it
    defaults to the best-glide value `sqrt(cd0 / k_induced)`, the canonical
    neutral choice for a parabolic polar; any positive value can be set.
    """

    mass: float = 9.5
    wing_area: float = 0.65
    cd0: float = 0.01
    k_induced: float = 0.0156
    rho: float = 1.2
    g: float = 9.8
    wind: WindParams = field(default_factory=WindParams)
    cl_fixed: float | None = None

    def __post_init__(self):
        for name in ("mass", "wing_area", "rho", "g"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be finite and positive, got {value}")
        for name in ("cd0", "k_induced"):
            # zero is allowed so the drag-free conservative limit is runnable
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0.0):
                raise ValueError(f"{name} must be finite and nonnegative, got {value}")
        if self.cl_fixed is None:
            if self.cd0 <= 0.0 or self.k_induced <= 0.0:
                raise ValueError(
                    "cl_fixed must be given explicitly when the drag polar "
                    "is degenerate (cd0 or k_induced is zero)"
                )
            object.__setattr__(self, "cl_fixed",
                               math.sqrt(self.cd0 / self.k_induced))
        if not (math.isfinite(self.cl_fixed) and self.cl_fixed > 0.0):
            raise ValueError(f"cl_fixed must be positive, got {self.cl_fixed}")


def lift_drag(v, cl, p: BirdWindParams):
    """Lift and drag forces (N) at airspeed `v` and lift coefficient `cl`.

    `L = q S cl` and `D = q S (cd0 + k_induced cl^2)` with dynamic pressure
    `q = rho v^2 / 2`.
    """
    if ad.primal(v) < 0.0:
        raise ValueError(f"airspeed must be nonnegative, got {v}")
    q_s = 0.5 * p.rho * v * v * p.wing_area
    lift = q_s * cl
    drag = q_s * (p.cd0 + p.k_induced * cl * cl)
    return lift, drag


def _guard_singularities(v, gamma):
    vp = ad.primal(v)
    cg = math.cos(ad.primal(gamma))
    if vp < SINGULARITY_TOL:
        raise SingularStateError(f"airspeed {vp} below validity threshold")
    if abs(cg) < SINGULARITY_TOL:
        raise SingularStateError(
            f"flight-path angle {ad.primal(gamma)} too close to +-pi/2"
        )


def _drift_rows(xs, p: BirdWindParams, sign: int):
    """The seven drift rows over plain or dual scalars."""
    _, _, z, v, gamma, psi, phi = xs
    _guard_singularities(v, gamma)
    sg, cg = ad.sin(gamma), ad.cos(gamma)
    sp, cp = ad.sin(psi), ad.cos(psi)
    sf, cf = ad.sin(phi), ad.cos(phi)
    lift, drag = lift_drag(v, p.cl_fixed, p)
    w = wind_speed(z, p.wind)
    wdot = wind_rate(z, v, gamma, p.wind)
    m, g = p.mass, p.g
    return [
        v * cg * cp,
        v * cg * sp - w,
        v * sg,
        (-drag - m * g * sg + sign * m * wdot * cg * sp) / m,
        (lift * cf - m * g * cg - m * wdot * sg * sp) / (m * v),
        (lift * sf + m * wdot * cp) / (m * v * cg),
        0.0,
    ]


def drift_field(s: FlightState, p: BirdWindParams, sign: int = +1) -> np.ndarray:
    """Uncontrolled state rates `f(x)` at state `s`."""
    sign = check_wind_coupling_sign(sign)
    return np.array(_drift_rows(s.as_array(), p, sign))


def control_field() -> np.ndarray:
    """Constant control vector field `b`: a unit vector in the roll slot."""
    return np.array([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0])


def state_derivative(s: FlightState, u: float, p: BirdWindParams,
                     sign: int = +1) -> np.ndarray:
    """Closed-loop rates `f(x) + b * u` for roll rate `u` (rad/s)."""
    rates = drift_field(s, p, sign)
    rates[6] += u
    return rates


def legacy_two_input_derivative(s6, cl: float, phi: float, p: BirdWindParams,
                                sign: int = +1) -> np.ndarray:
    """Six-state rates for the two-input form with controls `(C_L, phi)`.

    This is the same point-mass model with `(x, y, z, V, gamma, psi)` as the
    state and lift coefficient and roll angle supplied directly, as used by
    trajectory-optimization tooling; it exists to replay externally supplied
    reference trajectories.  Agrees with the first six rows of
    :func:`drift_field` when `cl == p.cl_fixed` and `phi == s.phi`.
    """
    sign = check_wind_coupling_sign(sign)
    x, y, z, v, gamma, psi = (float(a) for a in s6)
    patched = replace(p, cl_fixed=cl)
    rows = _drift_rows([x, y, z, v, gamma, psi, phi], patched, sign)
    return np.array(rows[:6])


def drift_evaluator(p: BirdWindParams, sign: int = +1):
    """Drift `f` as a plain callable on 7-sequences, usable with dual scalars."""
    sign = check_wind_coupling_sign(sign)

    def f(xs):
        return _drift_rows(xs, p, sign)

    return f


def control_evaluator():
    """Control field `b` as a plain callable on 7-sequences."""

    def b(xs):
        return [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]

    return b
