"""Command-line harness: run scenarios and write CSV/JSON artifacts.

Subcommands
-----------
simulate         closed-loop soaring run; writes trajectory.csv + run_report.json
controllability  bracket rank test, obstruction and weight checks; writes JSON
compare          soaring run against a reference trajectory CSV; writes JSON
demo-esc         scalar extremum-seeking demo; writes CSV + JSON
demo-chenfliess  reachable-set demo for the quadratic-drift plane; writes JSON

Exit codes: 0 success, 1 input/usage error, 2 numeric diagnostic (singular
abort, rank deficiency, or a failed finite-difference step sweep).  Every
report embeds the fully resolved scenario, so outputs are self-describing,
and identical scenarios produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .chen_fliess import (
    PiecewiseConstant,
    quadratic_drift_exact_output,
    quadratic_drift_ode_output,
)
from .controllability import (
    DS_BAD_BRACKET,
    DiffScheme,
    NumericBreakdownError,
    bad_bracket_check,
    find_admissible_weight,
    larc_rank,
    scheme_agreement,
    weight_neutralization,
)
from .esc import scalar_esc_demo
from .fixtures import (
    QUADRATIC_DRIFT_BAD_BRACKET,
    ground_robot_fields,
    quadratic_drift_fields,
)
from .flight_dynamics import control_evaluator, drift_evaluator
from .scenario import Scenario, load_scenario
from .simulation import (
    compare_trajectories,
    detect_phases,
    energy_drift,
    read_reference_csv,
    simulate_ds,
    write_trajectory_csv,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERIC = 2


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _resolve_scenario(args) -> Scenario:
    scn = load_scenario(args.config) if args.config else Scenario()
    if getattr(args, "h", None) is not None:
        scn.h = args.h
    if getattr(args, "t_end", None) is not None:
        scn.t_end = args.t_end
    if getattr(args, "sign", None) is not None:
        scn.sign = int(args.sign)
    if getattr(args, "seed", None) is not None:
        scn.seed = args.seed
    if getattr(args, "reference", None) is not None:
        scn.reference = args.reference
    return scn


def _phase_payload(seg) -> dict:
    return {
        "intervals": [{"label": iv.label, "t_start": iv.t_start,
                       "t_end": iv.t_end} for iv in seg.intervals],
        "full_cycle": seg.full_cycle,
        "cycle_span": list(seg.cycle_span) if seg.cycle_span else None,
        "note": seg.note,
    }


def cmd_simulate(args) -> int:
    scn = _resolve_scenario(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    traj = simulate_ds(scn.initial_state, scn.bird, scn.esc,
                       t_end=scn.t_end, h=scn.h, sign=scn.sign)
    write_trajectory_csv(traj, out / "trajectory.csv")
    seg = detect_phases(traj, scn.phase_prominence, scn.turn_window)
    report = {
        "scenario": scn.as_dict(),
        "status": traj.status,
        "samples": len(traj.times),
        "phases": _phase_payload(seg),
        "energy_drift_total": energy_drift(traj),
        "energy_drift_cycle": (energy_drift(traj, *seg.cycle_span)
                               if seg.cycle_span else None),
    }
    _write_json(out / "run_report.json", report)
    return EXIT_OK if traj.status == "ok" else EXIT_NUMERIC


def _fields_and_origin(scn: Scenario):
    if scn.system == "soaring":
        fields = {"f": drift_evaluator(scn.bird, scn.sign),
                  "b": control_evaluator()}
        return fields, list(scn.initial_state.as_array()), DS_BAD_BRACKET
    if scn.system == "ground_robot":
        return ground_robot_fields(), [0.0, 0.0, 0.0], "[b1,[f,b1]]"
    return quadratic_drift_fields(), [0.0, 0.0], QUADRATIC_DRIFT_BAD_BRACKET


def _obstruction_demo(scn: Scenario, n_samples: int = 1000,
                      t_max: float = 5.0, bound: float = 0.1) -> dict:
    """Sample the reachable set of the quadratic-drift plane from the origin."""
    rng = np.random.default_rng(scn.seed)
    min_y = np.inf
    max_gap = 0.0
    for _ in range(n_samples):
        u = PiecewiseConstant.random(rng, t_max, bound)
        t = float(rng.uniform(0.0, t_max)) or t_max
        y = quadratic_drift_exact_output(0.0, 0.0, u, t)
        y_ode = quadratic_drift_ode_output(0.0, 0.0, u, t)
        min_y = min(min_y, y)
        max_gap = max(max_gap, abs(y - y_ode))
    return {"samples": n_samples, "control_bound": bound, "t_max": t_max,
            "min_output": min_y, "max_series_vs_ode": max_gap,
            "half_plane_respected": bool(min_y >= -1e-9)}


def cmd_controllability(args) -> int:
    scn = _resolve_scenario(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fields, x0, bad = _fields_and_origin(scn)
    central = DiffScheme(kind="central", sweep_ratio=0.5)
    report: dict = {"scenario": scn.as_dict(), "system": scn.system}
    status = EXIT_OK
    try:
        larc = larc_rank(scn.brackets, fields, x0, tol=scn.rank_tolerance)
        report["larc"] = larc.as_dict()
        agreement = scheme_agreement(scn.brackets, fields, x0, central=central)
        report["scheme_agreement"] = agreement
        report["numeric_breakdown"] = False

        bad_status = bad_bracket_check(fields, x0, distribution=scn.brackets,
                                       bad_bracket=bad)
        report["bad_bracket"] = bad_status.as_dict()

        if scn.system == "soaring":
            no_ad1 = [b for b in scn.brackets if b != "[f,b]"]
            if no_ad1 != list(scn.brackets):
                report["larc_without_ad1"] = larc_rank(
                    no_ad1, fields, x0, tol=scn.rank_tolerance).as_dict()
            found = find_admissible_weight()
            report["weight"] = {
                "check_1_5": weight_neutralization(1, 5).as_dict(),
                "smallest_admissible": list(found) if found else None,
            }
            if found is None:
                status = EXIT_NUMERIC
        if scn.system == "quadratic_drift":
            report["obstruction_demo"] = _obstruction_demo(scn)
        if not larc.full_rank:
            status = EXIT_NUMERIC
    except NumericBreakdownError as err:
        report["numeric_breakdown"] = True
        report["diagnostic"] = str(err)
        status = EXIT_NUMERIC
    _write_json(out / "controllability_report.json", report)
    return status


def cmd_compare(args) -> int:
    scn = _resolve_scenario(args)
    if not scn.reference:
        print("compare needs a reference CSV (--reference or scenario key)",
              file=sys.stderr)
        return EXIT_INPUT
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        ref = read_reference_csv(scn.reference, scn.bird)
    except (OSError, ValueError) as err:
        print(f"cannot read reference: {err}", file=sys.stderr)
        return EXIT_INPUT
    traj = simulate_ds(scn.initial_state, scn.bird, scn.esc,
                       t_end=scn.t_end, h=scn.h, sign=scn.sign)
    try:
        cmp_report = compare_trajectories(traj, ref)
    except ValueError as err:
        print(f"comparison failed: {err}", file=sys.stderr)
        return EXIT_INPUT
    _write_json(out / "comparison_report.json", {
        "scenario": scn.as_dict(),
        "reference": scn.reference,
        "run_status": traj.status,
        "rmse": cmp_report.rmse,
        "energy_drift_run": cmp_report.energy_drift,
        "energy_drift_reference": cmp_report.energy_drift_ref,
        "overlap_seconds": cmp_report.overlap,
    })
    return EXIT_OK


def cmd_demo_esc(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t_end = args.t_end if args.t_end is not None else 10.0
    h = args.h if args.h is not None else 1e-4
    times, xs = scalar_esc_demo(args.x0, x_star=args.x_star,
                                omega=args.omega, t_end=t_end, h=h)
    with open(out / "scalar_esc.csv", "w") as fh:
        fh.write("t,x\n")
        for t, x in zip(times, xs):
            fh.write(f"{t:.9g},{x:.9g}\n")
    tail = xs[times >= times[-1] - 1.0]
    _write_json(out / "scalar_esc_report.json", {
        "x0": args.x0, "x_star": args.x_star, "omega": args.omega,
        "t_end": t_end, "h": h,
        "final_error": abs(float(xs[-1]) - args.x_star),
        "final_window_max_error": float(np.max(np.abs(tail - args.x_star))),
    })
    return EXIT_OK


def cmd_demo_chenfliess(args) -> int:
    scn = _resolve_scenario(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    demo = _obstruction_demo(scn, n_samples=args.samples)
    _write_json(out / "reachable_set_report.json",
                {"scenario": scn.as_dict(), "obstruction_demo": demo})
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dsoar",
        description="dynamic-soaring simulation and controllability toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario JSON file")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--h", type=float, help="integration step override")
    common.add_argument("--t-end", dest="t_end", type=float,
                        help="horizon override (s)")
    common.add_argument("--sign", type=int, choices=(1, -1),
                        help="wind-coupling sign override")
    common.add_argument("--seed", type=int, help="seed for randomized demos")

    p = sub.add_parser("simulate", parents=[common],
                       help="run the closed-loop soaring scenario")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("controllability", parents=[common],
                       help="bracket rank, obstruction and weight checks")
    p.set_defaults(fn=cmd_controllability)

    p = sub.add_parser("compare", parents=[common],
                       help="compare a run against a reference CSV")
    p.add_argument("--reference", help="reference trajectory CSV")
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("demo-esc", parents=[common],
                       help="scalar extremum-seeking demo")
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--x-star", dest="x_star", type=float, default=1.0)
    p.add_argument("--omega", type=float, default=50.0)
    p.set_defaults(fn=cmd_demo_esc)

    p = sub.add_parser("demo-chenfliess", parents=[common],
                       help="reachable-set obstruction demo")
    p.add_argument("--samples", type=int, default=1000)
    p.set_defaults(fn=cmd_demo_chenfliess)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
