"""Logistic wind-shear profile and its derivatives.

The horizontal wind blows from north to south and varies with altitude as

    W(z) = w0 / (1 + exp(-z / delta)),

a sigmoid that saturates at the free-stream speed `w0` above the shear
layer and decays to zero below it; `delta` sets the layer thickness.  As
`delta -> 0` the profile approaches a discontinuous step at `z = 0`.

Along a flight path the wind seen by the vehicle changes at the rate
`Wdot = dW/dz * zdot` with `zdot = V sin(gamma)`, which is the quantity
the energy-gain objective is built from.

All functions accept plain floats or :class:`dsoar.autodiff.Dual` scalars,
so they can sit inside vector fields that get Lie-bracketed numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import autodiff as ad

# exp() overflows IEEE doubles near 709; clamp the logistic exponent there
_EXP_CLAMP = 700.0


@dataclass(frozen=True)
class WindParams:
    """Free-stream speed `w0` (m/s) and shear-layer thickness `delta` (m)."""

    w0: float = 7.8
    delta: float = 7.0

    def __post_init__(self):
        if not (math.isfinite(self.w0) and self.w0 >= 0.0):
            raise ValueError(f"w0 must be finite and >= 0, got {self.w0}")
        if not (math.isfinite(self.delta) and self.delta > 0.0):
            raise ValueError(f"delta must be finite and > 0, got {self.delta}")


def _check_finite(name, value):
    if not math.isfinite(ad.primal(value)):
        raise ValueError(f"{name} must be finite, got {value}")


def wind_speed(z, p: WindParams):
    """Wind speed at altitude `z`: `w0 / (1 + exp(-z/delta))`, in m/s.

    Monotone nondecreasing in `z` and bounded by (0, w0); saturates to the
    bounds once `|z/delta|` exceeds the clamp that keeps exp() in range.
    """
    _check_finite("z", z)
    u = -z / p.delta
    up = ad.primal(u)
    if up > _EXP_CLAMP:
        return 0.0 * u  # deep below the layer, z << -delta
    if up < -_EXP_CLAMP:
        return p.w0 + 0.0 * u
    return p.w0 / (1.0 + ad.exp(u))


def wind_gradient(z, p: WindParams):
    """Altitude derivative dW/dz, in (m/s)/m.

    Evaluated as `w0 * a / (delta * (1 + a)^2)` with `a = exp(-|z|/delta)`;
    the logistic derivative is even in `z`, and keeping the exponent
    nonpositive avoids overflow on either tail.  Strictly positive, maximal
    at `z = 0` where it equals `w0 / (4 delta)`.
    """
    _check_finite("z", z)
    u = z / p.delta if ad.primal(z) < 0.0 else -z / p.delta
    if ad.primal(u) < -_EXP_CLAMP:
        return 0.0 * u  # saturated tail: gradient underflows to zero
    a = ad.exp(u)
    s = 1.0 + a
    return p.w0 * a / (p.delta * s * s)


def wind_rate(z, v, gamma, p: WindParams):
    """Along-trajectory wind rate `Wdot = dW/dz * V sin(gamma)`, in m/s^2."""
    _check_finite("v", v)
    _check_finite("gamma", gamma)
    return wind_gradient(z, p) * v * ad.sin(gamma)
