"""Scenario files: one JSON document describing a complete run.

A scenario bundles everything a command needs -- vehicle and wind
constants, controller dither parameters, the initial state, integration
settings, the wind-coupling sign, the bracket set for the rank test, and
optional paths.  Every field has a default (the albatross constants, the
usual initial state, and the tuned dither), so the empty document ``{}``
is a valid scenario and runs the standard soaring case.

Reports embed the fully resolved scenario via :meth:`Scenario.as_dict`,
so an output file always records exactly what produced it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .controllability import DS_BRACKETS, FormalBracket
from .esc import EscParams
from .fixtures import GROUND_ROBOT_BRACKETS, QUADRATIC_DRIFT_BRACKETS
from .flight_dynamics import BirdWindParams, FlightState, check_wind_coupling_sign
from .windfield import WindParams

DEFAULT_INITIAL_STATE = (0.0, 0.0, 10.0, 14.0, 0.6, 1.4, -0.1)

SYSTEMS = ("soaring", "ground_robot", "quadratic_drift")

_DEFAULT_BRACKETS = {
    "soaring": DS_BRACKETS,
    "ground_robot": GROUND_ROBOT_BRACKETS,
    "quadratic_drift": QUADRATIC_DRIFT_BRACKETS,
}


@dataclass
class Scenario:
    """Fully resolved configuration for one run."""

    bird: BirdWindParams = field(default_factory=BirdWindParams)
    esc: EscParams = field(default_factory=EscParams)
    initial_state: FlightState = field(
        default_factory=lambda: FlightState(*DEFAULT_INITIAL_STATE))
    t_end: float = 10.0
    h: float = 1e-3
    sign: int = +1
    system: str = "soaring"
    brackets: tuple[str, ...] | None = None
    rank_tolerance: float = 1e-8
    phase_prominence: float = 0.5
    turn_window: float = 0.5
    reference: str | None = None
    seed: int = 0

    def __post_init__(self):
        self.sign = check_wind_coupling_sign(self.sign)
        if self.t_end <= 0.0 or not math.isfinite(self.t_end):
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if self.h <= 0.0 or not math.isfinite(self.h):
            raise ValueError(f"h must be positive, got {self.h}")
        if self.system not in SYSTEMS:
            raise ValueError(f"system must be one of {SYSTEMS}, got {self.system!r}")
        if self.rank_tolerance <= 0.0:
            raise ValueError("rank_tolerance must be positive")
        if self.phase_prominence <= 0.0 or self.turn_window <= 0.0:
            raise ValueError("phase_prominence and turn_window must be positive")
        if self.brackets is None:
            self.brackets = _DEFAULT_BRACKETS[self.system]
        else:
            self.brackets = tuple(self.brackets)
            for b in self.brackets:
                FormalBracket.parse(b)  # raises on malformed expressions

    def as_dict(self) -> dict:
        """JSON-ready dump of every resolved setting."""
        return {
            "bird": {
                "mass": self.bird.mass,
                "wing_area": self.bird.wing_area,
                "cd0": self.bird.cd0,
                "k_induced": self.bird.k_induced,
                "rho": self.bird.rho,
                "g": self.bird.g,
                "cl": self.bird.cl_fixed,
            },
            "wind": {"w0": self.bird.wind.w0, "delta": self.bird.wind.delta},
            "esc": {"a": self.esc.a, "b": self.esc.b,
                    "omega": self.esc.omega, "mu": self.esc.mu},
            "initial_state": list(self.initial_state.as_array()),
            "t_end": self.t_end,
            "h": self.h,
            "wind_coupling_sign": self.sign,
            "system": self.system,
            "brackets": list(self.brackets),
            "rank_tolerance": self.rank_tolerance,
            "phase_prominence": self.phase_prominence,
            "turn_window": self.turn_window,
            "reference": self.reference,
            "seed": self.seed,
        }


def _take(table: dict, key: str, default):
    return table[key] if key in table else default


def _require_keys(table: dict, allowed, where: str):
    unknown = sorted(set(table) - set(allowed))
    if unknown:
        raise ValueError(f"unknown key(s) {unknown} in {where}")


def scenario_from_dict(doc: dict) -> Scenario:
    """Build a validated Scenario from a parsed JSON document."""
    _require_keys(doc, ("bird", "wind", "esc", "initial_state", "t_end", "h",
                        "wind_coupling_sign", "system", "brackets",
                        "rank_tolerance", "phase_prominence", "turn_window",
                        "reference", "seed"), "scenario")
    bird_doc = doc.get("bird", {})
    _require_keys(bird_doc, ("mass", "wing_area", "cd0", "k_induced", "rho",
                             "g", "cl"), "bird")
    wind_doc = doc.get("wind", {})
    _require_keys(wind_doc, ("w0", "delta"), "wind")
    esc_doc = doc.get("esc", {})
    _require_keys(esc_doc, ("a", "b", "omega", "mu"), "esc")

    wind = WindParams(w0=_take(wind_doc, "w0", 7.8),
                      delta=_take(wind_doc, "delta", 7.0))
    bird_defaults = BirdWindParams()
    bird = BirdWindParams(
        mass=_take(bird_doc, "mass", bird_defaults.mass),
        wing_area=_take(bird_doc, "wing_area", bird_defaults.wing_area),
        cd0=_take(bird_doc, "cd0", bird_defaults.cd0),
        k_induced=_take(bird_doc, "k_induced", bird_defaults.k_induced),
        rho=_take(bird_doc, "rho", bird_defaults.rho),
        g=_take(bird_doc, "g", bird_defaults.g),
        wind=wind,
        cl_fixed=_take(bird_doc, "cl", None),
    )
    esc = EscParams(a=_take(esc_doc, "a", 2.1), b=_take(esc_doc, "b", 0.8),
                    omega=_take(esc_doc, "omega", 5.8),
                    mu=_take(esc_doc, "mu", 0.55))
    x0_raw = _take(doc, "initial_state", DEFAULT_INITIAL_STATE)
    if len(x0_raw) != 7:
        raise ValueError(f"initial_state needs 7 entries, got {len(x0_raw)}")
    x0 = FlightState(*(float(v) for v in x0_raw))
    return Scenario(
        bird=bird,
        esc=esc,
        initial_state=x0,
        t_end=float(_take(doc, "t_end", 10.0)),
        h=float(_take(doc, "h", 1e-3)),
        sign=int(_take(doc, "wind_coupling_sign", +1)),
        system=_take(doc, "system", "soaring"),
        brackets=_take(doc, "brackets", None),
        rank_tolerance=float(_take(doc, "rank_tolerance", 1e-8)),
        phase_prominence=float(_take(doc, "phase_prominence", 0.5)),
        turn_window=float(_take(doc, "turn_window", 0.5)),
        reference=_take(doc, "reference", None),
        seed=int(_take(doc, "seed", 0)),
    )


def load_scenario(path) -> Scenario:
    """Read and validate a scenario JSON file.

    Parse failures carry the line/column from the JSON decoder; validation
    failures name the offending field.
    """
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as err:
            raise ValueError(
                f"{path}: line {err.lineno}, column {err.colno}: {err.msg}"
            ) from None
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: scenario document must be a JSON object")
    return scenario_from_dict(doc)
