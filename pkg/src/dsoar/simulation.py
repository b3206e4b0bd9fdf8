"""Closed-loop integration, energy bookkeeping, and trajectory analysis.

The integrator is deliberately plain: classical fixed-step RK4 with the
control law re-evaluated at every stage, so a run is reproducible to the
bit given the same scenario.  The dither frequency sets the resolution
requirement; steps longer than a twentieth of the dither period are
rejected rather than silently aliasing the controller.

Energy bookkeeping works with specific energy `e = z + V^2 / (2 g)` (total
mechanical energy per unit weight, in metres) and its exact decomposition
along the model's trajectories

    de/dt = -D V / (m g)  +  sgn * V Wdot cos(gamma) sin(psi) / g,

drag loss plus wind coupling.  With wind and drag off the drift is
conservative and `e` is constant, which pins down integrator drift.

A soaring cycle is segmented into the four classic phases -- windward
climb, high-altitude turn, leeward descent, low-altitude turn -- from the
altitude extrema of the trajectory.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .esc import EscParams, dither_signals, objective_from_components
from .flight_dynamics import (
    BirdWindParams,
    FlightState,
    SingularStateError,
    check_wind_coupling_sign,
    drift_evaluator,
    lift_drag,
)
from .windfield import wind_rate

STATE_NAMES = ("x", "y", "z", "V", "gamma", "psi", "phi")
CSV_HEADER = ("t",) + STATE_NAMES + ("u", "J", "e", "E")

PHASE_LABELS = ("windward_climb", "high_turn", "leeward_descent", "low_turn")


@dataclass
class Trajectory:
    """Time-indexed log of a simulation run.

    `states` has one row per sample in the order of `STATE_NAMES`;
    `controls` holds the roll-rate command evaluated at the sample time,
    `objective` the energy-gain objective, `specific_energy` metres, and
    `total_energy` joules.  `status` is "ok" for a completed run or a short
    label describing an early abort (the logged samples are still valid).
    """

    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    objective: np.ndarray
    specific_energy: np.ndarray
    total_energy: np.ndarray
    status: str = "ok"

    def __post_init__(self):
        n = len(self.times)
        if n < 2:
            raise ValueError("a trajectory needs at least two samples")
        for name in ("controls", "objective", "specific_energy", "total_energy"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"length of {name} does not match times")
        if self.states.shape != (n, 7):
            raise ValueError(f"states must have shape ({n}, 7)")
        if not np.all(np.diff(self.times) > 0.0):
            raise ValueError("times must be strictly increasing")

    def state(self, i: int) -> FlightState:
        return FlightState.from_array(self.states[i])

    @property
    def zdot(self) -> np.ndarray:
        """Altitude rate `V sin(gamma)` at every sample."""
        return self.states[:, 3] * np.sin(self.states[:, 4])


@dataclass
class PhaseInterval:
    label: str
    t_start: float
    t_end: float


@dataclass
class PhaseSegmentation:
    """Ordered phase intervals plus whether a full four-phase cycle exists."""

    intervals: list[PhaseInterval]
    full_cycle: bool
    cycle_span: tuple[float, float] | None = None
    note: str = ""

    def labels(self) -> list[str]:
        return [iv.label for iv in self.intervals]


@dataclass
class ComparisonReport:
    """Per-state RMSE over the time overlap plus per-run energy drift."""

    rmse: dict[str, float]
    energy_drift: float
    energy_drift_ref: float
    overlap: float


def rk4_step(deriv, s, t: float, h: float):
    """One classical 4th-order Runge-Kutta step of `deriv(t, y)` from `s`."""
    if h <= 0.0:
        raise ValueError(f"step size must be positive, got {h}")
    k1 = deriv(t, s)
    k2 = deriv(t + 0.5 * h, s + 0.5 * h * k1)
    k3 = deriv(t + 0.5 * h, s + 0.5 * h * k2)
    k4 = deriv(t + h, s + h * k3)
    return s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def specific_energy(s: FlightState, p: BirdWindParams) -> float:
    """Total mechanical energy per unit weight, `z + V^2 / (2 g)` (m)."""
    return s.z + s.v * s.v / (2.0 * p.g)


def energy_rate_terms(s: FlightState, p: BirdWindParams,
                      sign: int = +1) -> tuple[float, float]:
    """Drag and wind terms of the specific-energy rate (m/s each).

    `drag_term = -D V / (m g)` and
    `wind_term = sgn * V Wdot cos(gamma) sin(psi) / g`; their sum equals
    `V sin(gamma) + V Vdot / g` along the implemented drift exactly, for
    either wind-coupling sign.
    """
    sign = check_wind_coupling_sign(sign)
    _, drag = lift_drag(s.v, p.cl_fixed, p)
    wdot = wind_rate(s.z, s.v, s.gamma, p.wind)
    drag_term = -drag * s.v / (p.mass * p.g)
    wind_term = sign * s.v * wdot * math.cos(s.gamma) * math.sin(s.psi) / p.g
    return drag_term, wind_term


def simulate_ds(x0: FlightState, p: BirdWindParams, e: EscParams,
                t_end: float = 10.0, h: float = 1e-3, sign: int = +1,
                control=None) -> Trajectory:
    """Integrate the closed-loop soaring system from `x0`.

    The roll rate is the extremum-seeking law by default; pass `control`
    (a callable `control(t, state_row) -> u`) to override it, e.g.
    `lambda t, y: 0.0` for the constant-roll reference trajectory.

    The step must resolve the dither: `h <= (2 pi / omega) / 20` is
    enforced even when the control is overridden, since the default
    scenario is the dithered loop.  If the dynamics hit a singularity or
    the state stops being finite, the trajectory logged so far is returned
    with a descriptive `status` instead of raising.
    """
    sign = check_wind_coupling_sign(sign)
    if t_end <= 0.0 or h <= 0.0:
        raise ValueError("t_end and h must be positive")
    if h > e.period / 20.0:
        raise ValueError(
            f"step {h} too coarse for dither period {e.period:.6g}; "
            f"need h <= {e.period / 20.0:.6g}"
        )

    drift = drift_evaluator(p, sign)

    def esc_u(t, y):
        j = objective_from_components(y[2], y[3], y[4], y[5], p)
        d = dither_signals(t, e)
        return j * d.u1 + d.u2

    u_of = esc_u if control is None else control

    def deriv(t, y):
        rates = drift(y)
        rates[6] = u_of(t, y)
        return np.asarray(rates)

    n = int(round(t_end / h))
    times = np.empty(n + 1)
    states = np.empty((n + 1, 7))
    controls = np.empty(n + 1)
    objective = np.empty(n + 1)

    y = x0.as_array()
    status = "ok"
    filled = 0
    for k in range(n + 1):
        t = k * h
        times[k] = t
        states[k] = y
        objective[k] = objective_from_components(y[2], y[3], y[4], y[5], p)
        controls[k] = u_of(t, y)
        filled = k + 1
        if k == n:
            break
        try:
            y = rk4_step(deriv, y, t, h)
        except SingularStateError as err:
            status = f"singular at t={t + h:.6g}: {err}"
            break
        if not np.all(np.isfinite(y)):
            status = f"non-finite state at t={t + h:.6g}"
            break
        if y[3] <= 0.0 or abs(y[4]) >= math.pi / 2:
            # a discrete step can hop straight over the pointwise guard
            status = (f"singular at t={t + h:.6g}: state left the model "
                      f"domain (V={y[3]:.4g}, gamma={y[4]:.4g})")
            break

    if filled < 2:
        # the very first step failed; there is no trajectory to report
        raise SingularStateError(f"initial step failed: {status}")
    times = times[:filled]
    states = states[:filled]
    controls = controls[:filled]
    objective = objective[:filled]
    e_spec = states[:, 2] + states[:, 3] ** 2 / (2.0 * p.g)
    e_total = p.mass * p.g * e_spec
    return Trajectory(times=times, states=states, controls=controls,
                      objective=objective, specific_energy=e_spec,
                      total_energy=e_total, status=status)


def detect_phases(traj: Trajectory, prominence: float = 0.5,
                  turn_window: float = 0.5) -> PhaseSegmentation:
    """Segment a trajectory into soaring phases from altitude extrema.

    Altitude maxima/minima with at least `prominence` metres of prominence
    mark high/low turns; a window of `turn_window` seconds on either side
    of each extremum (clipped to the trajectory and to midpoints between
    neighbouring extrema) is labelled as the turn.  The stretches between
    turns are climbs or descents by the sign of the mean altitude rate.
    A full cycle is a consecutive run windward_climb -> high_turn ->
    leeward_descent -> low_turn.
    """
    t = traj.times
    z = traj.states[:, 2]
    zdot = traj.zdot

    hi, _ = find_peaks(z, prominence=prominence)
    lo, _ = find_peaks(-z, prominence=prominence)
    extrema = sorted([(i, "high_turn") for i in hi] + [(i, "low_turn") for i in lo])

    def leg_label(i0, i1):
        mean_rate = float(np.mean(zdot[i0:i1 + 1]))
        return "windward_climb" if mean_rate >= 0.0 else "leeward_descent"

    intervals: list[PhaseInterval] = []
    if not extrema:
        intervals.append(PhaseInterval(leg_label(0, len(t) - 1), t[0], t[-1]))
        return PhaseSegmentation(intervals, False, None, "incomplete cycle")

    # turn windows, clipped against trajectory ends and neighbour midpoints
    bounds = []
    for k, (idx, label) in enumerate(extrema):
        lo_t = t[idx] - turn_window
        hi_t = t[idx] + turn_window
        if k > 0:
            lo_t = max(lo_t, 0.5 * (t[extrema[k - 1][0]] + t[idx]))
        if k + 1 < len(extrema):
            hi_t = min(hi_t, 0.5 * (t[idx] + t[extrema[k + 1][0]]))
        bounds.append((max(lo_t, t[0]), min(hi_t, t[-1]), label))

    cursor = t[0]
    for lo_t, hi_t, label in bounds:
        if lo_t > cursor:
            i0 = int(np.searchsorted(t, cursor))
            i1 = int(np.searchsorted(t, lo_t))
            intervals.append(PhaseInterval(leg_label(i0, min(i1, len(t) - 1)),
                                           cursor, lo_t))
        intervals.append(PhaseInterval(label, lo_t, hi_t))
        cursor = hi_t
    if cursor < t[-1]:
        i0 = int(np.searchsorted(t, cursor))
        intervals.append(PhaseInterval(leg_label(i0, len(t) - 1), cursor, t[-1]))

    labels = [iv.label for iv in intervals]
    full_cycle = False
    cycle_span = None
    for k in range(len(labels) - 3):
        if tuple(labels[k:k + 4]) == PHASE_LABELS:
            full_cycle = True
            cycle_span = (intervals[k].t_start, intervals[k + 3].t_end)
            break
    note = "" if full_cycle else "incomplete cycle"
    return PhaseSegmentation(intervals, full_cycle, cycle_span, note)


def energy_drift(traj: Trajectory, t0: float | None = None,
                 t1: float | None = None) -> float:
    """Relative total-energy change `|TE(t1) - TE(t0)| / |TE(t0)|`."""
    te = traj.total_energy
    i0 = 0 if t0 is None else int(np.searchsorted(traj.times, t0))
    i1 = len(te) - 1 if t1 is None else min(int(np.searchsorted(traj.times, t1)),
                                            len(te) - 1)
    return abs(te[i1] - te[i0]) / abs(te[i0])


def compare_trajectories(traj: Trajectory, ref: Trajectory) -> ComparisonReport:
    """Per-state RMSE of `traj` against `ref` over their time overlap.

    The reference is resampled onto `traj`'s sample times by linear
    interpolation.  Energy drift is reported for each trajectory over its
    own full horizon.
    """
    t0 = max(traj.times[0], ref.times[0])
    t1 = min(traj.times[-1], ref.times[-1])
    if t1 <= t0:
        raise ValueError("empty overlap between trajectory time ranges")
    mask = (traj.times >= t0) & (traj.times <= t1)
    ts = traj.times[mask]
    rmse = {}
    for j, name in enumerate(STATE_NAMES):
        ref_col = np.interp(ts, ref.times, ref.states[:, j])
        err = traj.states[mask, j] - ref_col
        rmse[name] = float(np.sqrt(np.mean(err ** 2)))
    return ComparisonReport(rmse=rmse,
                            energy_drift=energy_drift(traj),
                            energy_drift_ref=energy_drift(ref),
                            overlap=float(t1 - t0))


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Write a trajectory as CSV with 9-significant-digit floats."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for k in range(len(traj.times)):
            row = [traj.times[k], *traj.states[k], traj.controls[k],
                   traj.objective[k], traj.specific_energy[k],
                   traj.total_energy[k]]
            writer.writerow(f"{v:.9g}" for v in row)


def read_reference_csv(path, p: BirdWindParams | None = None) -> Trajectory:
    """Load a reference trajectory from CSV.

    Requires columns `t, x, y, z, V, gamma, psi`; `phi` is used when
    present and zero-filled otherwise (6-state optimal-control output has
    no roll-angle state).  Any other columns are ignored.  Energy columns
    are recomputed from `z` and `V` with the parameters `p`.
    """
    p = p or BirdWindParams()
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValueError(f"{path}: empty reference CSV")
        required = ["t", "x", "y", "z", "V", "gamma", "psi"]
        missing = [c for c in required if c not in reader.fieldnames]
        if missing:
            raise ValueError(f"{path}: missing columns {missing}")
        has_phi = "phi" in reader.fieldnames
        rows = list(reader)
    if len(rows) < 2:
        raise ValueError(f"{path}: need at least two samples")
    n = len(rows)
    times = np.empty(n)
    states = np.zeros((n, 7))
    for k, row in enumerate(rows):
        times[k] = float(row["t"])
        for j, name in enumerate(STATE_NAMES[:6]):
            states[k, j] = float(row[name])
        if has_phi:
            states[k, 6] = float(row["phi"])
    e_spec = states[:, 2] + states[:, 3] ** 2 / (2.0 * p.g)
    zeros = np.zeros(n)
    return Trajectory(times=times, states=states, controls=zeros.copy(),
                      objective=zeros.copy(), specific_energy=e_spec,
                      total_energy=p.mass * p.g * e_spec)
