"""Dynamic-soaring simulation and numeric geometric-control toolkit.

The package has two halves that share one model:

* a 3-DOF point-mass glider in logistic wind shear, closed in a loop with
  an extremum-seeking roll-rate controller and integrated with fixed-step
  RK4 (:mod:`dsoar.flight_dynamics`, :mod:`dsoar.esc`,
  :mod:`dsoar.simulation`);
* numeric machinery for nonlinear controllability analysis of the same
  model: nested Lie brackets via forward-mode dual numbers, the
  accessibility rank test, bad-bracket/weight bookkeeping, and a truncated
  Chen-Fliess expansion (:mod:`dsoar.controllability`,
  :mod:`dsoar.chen_fliess`).

The ``dsoar`` command line (see :mod:`dsoar.cli`) runs scenario files and
writes CSV/JSON artifacts.
"""

from .windfield import WindParams, wind_gradient, wind_rate, wind_speed
from .flight_dynamics import (
    BirdWindParams,
    FlightState,
    SingularStateError,
    control_evaluator,
    control_field,
    drift_evaluator,
    drift_field,
    legacy_two_input_derivative,
    lift_drag,
    state_derivative,
)
from .esc import (
    DitherPair,
    EscParams,
    dither_signals,
    esc_control,
    objective_energy_gain,
    scalar_esc_demo,
)
from .simulation import (
    ComparisonReport,
    PhaseSegmentation,
    Trajectory,
    compare_trajectories,
    detect_phases,
    energy_drift,
    energy_rate_terms,
    read_reference_csv,
    rk4_step,
    simulate_ds,
    specific_energy,
    write_trajectory_csv,
)
from .controllability import (
    DS_BAD_BRACKET,
    DS_BRACKETS,
    DS_BRACKETS_NO_AD1,
    DiffScheme,
    FormalBracket,
    LarcReport,
    NumericBreakdownError,
    bad_bracket_check,
    find_admissible_weight,
    larc_rank,
    lie_bracket,
    nested_bracket,
    numeric_jacobian,
    weight_neutralization,
)
from .chen_fliess import (
    PiecewiseConstant,
    fliess_output,
    iterated_integral,
    quadratic_drift_exact_output,
    quadratic_drift_ode_output,
)
from .scenario import Scenario, load_scenario

__version__ = "0.1.0"
