"""Small canonical control-affine systems used as rank-test fixtures.

Both are classics of nonlinear controllability and serve as known-answer
checks for the bracket machinery:

* the *ground robot* (unicycle): driftless, inputs are forward speed and
  turn rate.  Linearization is rank-deficient, but the bracket of the two
  input fields generates the sideways direction (the parallel-parking
  motion), so three fields span all of `(x1, x2, theta)` space.
* the *quadratic-drift plane*: `x1dot = u`, `x2dot = x1^2`.  Accessible
  from the origin (rank 2) but not controllable: `x2` can only grow, so
  the reachable set is a half plane.  The direction that completes the
  span comes from a bracket with an even number of control factors, whose
  flow cannot be reversed by flipping the control sign -- the textbook
  obstruction.
"""

from __future__ import annotations

from . import autodiff as ad

# spanning sets for the rank test
GROUND_ROBOT_BRACKETS = ("b1", "b2", "[b1,b2]")
QUADRATIC_DRIFT_BRACKETS = ("b", "[[f,b],b]")
QUADRATIC_DRIFT_BAD_BRACKET = "[[f,b],b]"


def ground_robot_fields() -> dict:
    """Unicycle input fields over state `(x1, x2, theta)`; no drift."""

    def b1(s):
        _, _, theta = s
        return [ad.cos(theta), ad.sin(theta), 0.0]

    def b2(s):
        return [0.0, 0.0, 1.0]

    def f(s):
        return [0.0, 0.0, 0.0]

    return {"f": f, "b1": b1, "b2": b2}


def quadratic_drift_fields() -> dict:
    """Drift `(0, x1^2)` and control field `(1, 0)` over the plane."""

    def f(s):
        x1, _ = s
        return [0.0, x1 * x1]

    def b(s):
        return [1.0, 0.0]

    return {"f": f, "b": b}
