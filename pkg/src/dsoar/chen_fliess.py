"""Truncated Chen-Fliess functional expansion for control-affine systems.

For `xdot = f(x) + sum_i u_i(t) b_i(x)` with scalar output `y = h(x)`, the
output over a short horizon expands as a sum over multi-indices of iterated
Lie derivatives of `h` at the start point times iterated integrals of the
inputs:

    y(t) = h(x0) + sum_k sum_{(i_0..i_k)}
           L_{b_{i_0}} ... L_{b_{i_k}} h(x0) * I_{(i_k,...,i_0)}(t),

where index 0 stands for the drift (`xi_0(t) = t`) and index `i >= 1` for
`xi_i(t) = int u_i`.  Multi-indices here are stored outermost-integral
first, so `(0, 1)` is `int_0^t int_0^s u(sigma) dsigma ds` and its
coefficient is `L_b L_f h` (drift derivative taken first).

The expansion is the cleanest way to see why brackets with an even number
of control factors obstruct controllability: for the quadratic-drift plane
(`x1dot = u`, `x2dot = x1^2`, start at the origin) the series for `x2`
terminates and equals `2 * int int u int u`, a quantity that is nonnegative
for every input signal, so the reachable set is a half plane no matter how
the control is steered.  :func:`quadratic_drift_exact_output` evaluates
that terminating series exactly (up to quadrature), and
:func:`quadratic_drift_ode_output` cross-checks it by integrating the ODE.

Iterated integrals are computed by composite trapezoid per nesting level.
Piecewise-constant inputs are handled exactly by inserting their
breakpoints into the quadrature grid and sampling them mid-cell.
"""

from __future__ import annotations

import math
from bisect import bisect_right

import numpy as np

from . import autodiff as ad

MAX_SERIES_ORDER = 3


class PiecewiseConstant:
    """A piecewise-constant signal on `[0, inf)` with explicit breakpoints.

    `values[k]` holds on `[breakpoints[k], breakpoints[k+1])`; the last
    value extends to infinity.
    """

    def __init__(self, breakpoints, values):
        if len(breakpoints) != len(values):
            raise ValueError("need one value per breakpoint")
        if len(breakpoints) == 0 or breakpoints[0] != 0.0:
            raise ValueError("breakpoints must start at 0.0")
        if any(b1 <= b0 for b0, b1 in zip(breakpoints, breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        self.breakpoints = [float(b) for b in breakpoints]
        self.values = [float(v) for v in values]

    @classmethod
    def constant(cls, value: float) -> "PiecewiseConstant":
        return cls([0.0], [value])

    @classmethod
    def random(cls, rng: np.random.Generator, t_end: float, bound: float,
               max_segments: int = 5) -> "PiecewiseConstant":
        """Random signal with up to `max_segments` levels in `[-bound, bound]`."""
        n = int(rng.integers(1, max_segments + 1))
        cuts = np.sort(rng.uniform(0.0, t_end, size=n - 1))
        breakpoints = [0.0] + [float(c) for c in cuts]
        values = rng.uniform(-bound, bound, size=n)
        return cls(breakpoints, list(values))

    def __call__(self, t: float) -> float:
        return self.values[bisect_right(self.breakpoints, t) - 1]

    def sample(self, ts) -> np.ndarray:
        """Vectorized evaluation at an array of times."""
        idx = np.searchsorted(self.breakpoints, ts, side="right") - 1
        return np.asarray(self.values)[idx]


def _quad_grid(t: float, h: float, controls) -> np.ndarray:
    """Uniform grid on [0, t] merged with any control breakpoints."""
    n = max(2, int(math.ceil(t / h)) + 1)
    grid = np.linspace(0.0, t, n)
    extra = []
    for u in controls:
        for b in getattr(u, "breakpoints", []):
            if 0.0 < b < t:
                extra.append(b)
    if extra:
        grid = np.unique(np.concatenate([grid, np.asarray(extra)]))
    return grid


def iterated_integral(idx, controls, t: float, h: float | None = None) -> float:
    """Iterated integral for multi-index `idx` (outermost first) at time `t`.

    `controls` is a sequence of callables, one per input channel; index 0
    in `idx` denotes the time channel and index `i >= 1` the i-th control.
    `h` is the quadrature step (default `1e-3 * t`).
    """
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if not idx:
        raise ValueError("multi-index must be nonempty")
    if any(i < 0 or i > len(controls) for i in idx):
        raise ValueError(f"multi-index {idx} out of range for {len(controls)} controls")
    if t == 0.0:
        return 0.0
    h = 1e-3 * t if h is None else h
    grid = _quad_grid(t, h, controls)
    dt = np.diff(grid)
    mids = 0.5 * (grid[:-1] + grid[1:])

    inner = np.ones_like(grid)
    for i in reversed(idx):
        cell_mean = 0.5 * (inner[:-1] + inner[1:])
        if i == 0:
            weights = cell_mean * dt
        else:
            u = controls[i - 1]
            if hasattr(u, "sample"):
                uv = u.sample(mids)
            else:
                uv = np.array([u(s) for s in mids])
            weights = uv * cell_mean * dt
        inner = np.concatenate([[0.0], np.cumsum(weights)])
    return float(inner[-1])


def _lie_derivative(scalar_fn, field):
    """`x -> grad(scalar_fn)(x) . field(x)`, exact via a dual sweep."""

    def lifted(x):
        _, d = ad.jvp_scalar(scalar_fn, x, field(x))
        return d

    return lifted


def fliess_output(h_out, fields, x0, controls, t: float, order: int,
                  quad_step: float | None = None) -> float:
    """Series value of the output at time `t`, truncated at `order`.

    `fields` is `[drift, b_1, ..., b_m]`; `controls` is `[u_1, ..., u_m]`.
    All terms with up to `order + 1` iterated integrals are summed; the
    Lie-derivative coefficients are computed by nested forward-mode sweeps,
    so the fields and output map must be dual-safe.  Orders beyond
    `MAX_SERIES_ORDER` are refused.
    """
    if order < 0 or order > MAX_SERIES_ORDER:
        raise ValueError(f"order must be in [0, {MAX_SERIES_ORDER}], got {order}")
    if len(controls) != len(fields) - 1:
        raise ValueError("need one control signal per control field")
    x0 = list(x0)
    total = float(h_out(x0))
    m = len(controls)
    for k in range(order + 1):
        for seq in np.ndindex(*([m + 1] * (k + 1))):
            coeff_fn = h_out
            for i in seq:
                coeff_fn = _lie_derivative(coeff_fn, fields[i])
            coeff = float(coeff_fn(x0))
            if coeff == 0.0:
                continue
            total += coeff * iterated_integral(seq, controls, t, quad_step)
    return total


def quadratic_drift_exact_output(x0: float, y0: float, u, t: float,
                                 h: float | None = None) -> float:
    """Exact (terminating) series for `x2(t)` of the quadratic-drift plane.

        y(t) = y0 + x0^2 t + 2 x0 * I(0,1) + 2 * I(0,1,1)

    with `I` the iterated integrals of the input `u`.  From the origin only
    the last term survives, and it is nonnegative for any input -- the
    reachable half plane.
    """
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    controls = [u]
    return (y0 + x0 * x0 * t
            + 2.0 * x0 * iterated_integral((0, 1), controls, t, h)
            + 2.0 * iterated_integral((0, 1, 1), controls, t, h))


def quadratic_drift_ode_output(x0: float, y0: float, u: PiecewiseConstant,
                               t: float, h: float = 1e-3) -> float:
    """`x2(t)` by RK4 time-stepping, segment-aligned with the input levels.

    RK4 is exact (to roundoff) here because the state is polynomial in
    time within each constant-input segment; this is the independent check
    on :func:`quadratic_drift_exact_output`.
    """
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    edges = [b for b in u.breakpoints if 0.0 < b < t] + [t]
    x, y = float(x0), float(y0)
    t0 = 0.0
    for t1 in edges:
        span = t1 - t0
        if span <= 0.0:
            continue
        n = max(1, int(math.ceil(span / h)))
        dt = span / n
        uval = u(0.5 * (t0 + t1))
        for _ in range(n):
            # RK4 on (xdot, ydot) = (uval, x^2) with uval frozen
            k1 = x * x
            x2 = x + 0.5 * dt * uval
            k2 = x2 * x2
            k3 = k2
            x4 = x + dt * uval
            k4 = x4 * x4
            y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            x = x4
        t0 = t1
    return y
