"""Tests for scenario loading and the command-line harness."""

import json
import math

import numpy as np
import pytest

from dsoar.cli import main
from dsoar.scenario import DEFAULT_INITIAL_STATE, Scenario, load_scenario


# ---------------------------------------------------------------------------
# scenario loading
# ---------------------------------------------------------------------------

def write_config(tmp_path, doc):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(doc))
    return path


def test_empty_config_gives_standard_scenario(tmp_path):
    scn = load_scenario(write_config(tmp_path, {}))
    assert scn.bird.mass == 9.5
    assert scn.bird.wing_area == 0.65
    assert scn.bird.cd0 == 0.01
    assert scn.bird.k_induced == 0.0156
    assert scn.bird.rho == 1.2
    assert scn.bird.g == 9.8
    assert scn.bird.wind.w0 == 7.8
    assert scn.bird.wind.delta == 7.0
    assert scn.bird.cl_fixed == pytest.approx(math.sqrt(0.01 / 0.0156))
    assert (scn.esc.a, scn.esc.b, scn.esc.omega, scn.esc.mu) == (2.1, 0.8, 5.8, 0.55)
    np.testing.assert_allclose(scn.initial_state.as_array(),
                               DEFAULT_INITIAL_STATE)
    assert scn.t_end == 10.0 and scn.h == 1e-3 and scn.sign == +1


def test_partial_override_keeps_other_defaults(tmp_path):
    scn = load_scenario(write_config(tmp_path, {"esc": {"omega": 5.0}}))
    assert scn.esc.omega == 5.0
    assert scn.esc.a == 2.1 and scn.esc.b == 0.8 and scn.esc.mu == 0.55
    assert scn.bird.mass == 9.5


def test_invalid_field_names_the_culprit(tmp_path):
    with pytest.raises(ValueError, match="delta"):
        load_scenario(write_config(tmp_path, {"wind": {"delta": 0.0}}))


def test_unknown_keys_rejected(tmp_path):
    with pytest.raises(ValueError, match="unknown key"):
        load_scenario(write_config(tmp_path, {"bierd": {}}))


def test_parse_error_reports_location(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"esc": {"omega": }}')
    with pytest.raises(ValueError, match="line 1"):
        load_scenario(path)


def test_bad_bracket_string_rejected(tmp_path):
    with pytest.raises(ValueError):
        load_scenario(write_config(tmp_path, {"brackets": ["[f,b"]}))


def test_scenario_dict_embeds_everything():
    doc = Scenario().as_dict()
    assert doc["wind_coupling_sign"] == 1
    assert doc["bird"]["mass"] == 9.5
    assert len(doc["initial_state"]) == 7
    assert doc["brackets"][0] == "f"
    json.dumps(doc)  # must be serializable as-is


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------

def test_simulate_writes_csv_and_report(tmp_path):
    cfg = write_config(tmp_path, {"t_end": 1.0})
    out = tmp_path / "out"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    rows = (out / "trajectory.csv").read_text().splitlines()
    assert rows[0] == "t,x,y,z,V,gamma,psi,phi,u,J,e,E"
    assert len(rows) == 1 + 1001
    report = json.loads((out / "run_report.json").read_text())
    assert report["status"] == "ok"
    assert report["scenario"]["wind_coupling_sign"] == 1
    assert report["phases"]["note"] == "incomplete cycle"


def test_simulate_full_cycle_with_flipped_coupling(tmp_path):
    out = tmp_path / "out"
    assert main(["simulate", "--out", str(out), "--sign", "-1"]) == 0
    report = json.loads((out / "run_report.json").read_text())
    assert report["phases"]["full_cycle"] is True
    assert report["energy_drift_cycle"] <= 0.10


def test_simulate_outputs_are_deterministic(tmp_path):
    cfg = write_config(tmp_path, {"t_end": 0.5})
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--config", str(cfg), "--out", str(out1)]) == 0
    assert main(["simulate", "--config", str(cfg), "--out", str(out2)]) == 0
    assert ((out1 / "trajectory.csv").read_bytes()
            == (out2 / "trajectory.csv").read_bytes())
    assert ((out1 / "run_report.json").read_bytes()
            == (out2 / "run_report.json").read_bytes())


def test_controllability_default_scenario(tmp_path):
    out = tmp_path / "out"
    assert main(["controllability", "--out", str(out)]) == 0
    report = json.loads((out / "controllability_report.json").read_text())
    assert report["larc"]["rank"] == 7
    assert report["larc"]["full_rank"] is True
    assert report["larc_without_ad1"]["rank"] == 6
    assert report["bad_bracket"]["nonvanishing"] is True
    assert report["bad_bracket"]["in_span"] is True
    assert report["weight"]["smallest_admissible"] == [1, 5]
    assert report["weight"]["check_1_5"]["passed"] is True
    assert max(report["scheme_agreement"].values()) <= 1e-3
    assert report["numeric_breakdown"] is False


def test_controllability_ground_robot(tmp_path):
    cfg = write_config(tmp_path, {"system": "ground_robot"})
    out = tmp_path / "out"
    assert main(["controllability", "--config", str(cfg),
                 "--out", str(out)]) == 0
    report = json.loads((out / "controllability_report.json").read_text())
    assert report["larc"]["rank"] == 3
    assert report["bad_bracket"]["nonvanishing"] is False


def test_controllability_quadratic_drift(tmp_path):
    cfg = write_config(tmp_path, {"system": "quadratic_drift", "seed": 3})
    out = tmp_path / "out"
    assert main(["controllability", "--config", str(cfg),
                 "--out", str(out)]) == 0
    report = json.loads((out / "controllability_report.json").read_text())
    assert report["larc"]["rank"] == 2
    demo = report["obstruction_demo"]
    assert demo["half_plane_respected"] is True
    assert demo["min_output"] >= -1e-9
    assert demo["max_series_vs_ode"] <= 1e-6


def test_compare_against_own_output(tmp_path):
    cfg = write_config(tmp_path, {"t_end": 1.0})
    out = tmp_path / "run"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    out2 = tmp_path / "cmp"
    assert main(["compare", "--config", str(cfg), "--out", str(out2),
                 "--reference", str(out / "trajectory.csv")]) == 0
    report = json.loads((out2 / "comparison_report.json").read_text())
    assert all(v <= 1e-6 for v in report["rmse"].values())
    assert report["overlap_seconds"] == pytest.approx(1.0)


def test_compare_without_reference_is_input_error(tmp_path):
    assert main(["compare", "--out", str(tmp_path / "x")]) == 1


def test_compare_disjoint_reference_is_input_error(tmp_path):
    ref = tmp_path / "ref.csv"
    ref.write_text("t,x,y,z,V,gamma,psi\n100,0,0,10,14,0.1,0.2\n101,0,0,10,14,0.1,0.2\n")
    cfg = write_config(tmp_path, {"t_end": 1.0})
    assert main(["compare", "--config", str(cfg), "--out", str(tmp_path / "x"),
                 "--reference", str(ref)]) == 1


def test_compare_missing_reference_file(tmp_path):
    assert main(["compare", "--out", str(tmp_path / "x"),
                 "--reference", str(tmp_path / "nope.csv")]) == 1


def test_demo_esc(tmp_path):
    out = tmp_path / "out"
    assert main(["demo-esc", "--x0", "0.0", "--out", str(out)]) == 0
    report = json.loads((out / "scalar_esc_report.json").read_text())
    assert report["final_window_max_error"] <= 0.2
    rows = (out / "scalar_esc.csv").read_text().splitlines()
    assert rows[0] == "t,x"


def test_demo_esc_rejects_zero_frequency(tmp_path):
    assert main(["demo-esc", "--omega", "0.0", "--out", str(tmp_path / "o")]) == 1


def test_demo_chenfliess(tmp_path):
    out = tmp_path / "out"
    assert main(["demo-chenfliess", "--samples", "50", "--seed", "1",
                 "--out", str(out)]) == 0
    report = json.loads((out / "reachable_set_report.json").read_text())
    assert report["obstruction_demo"]["half_plane_respected"] is True


def test_short_horizon_reports_incomplete_cycle(tmp_path):
    cfg = write_config(tmp_path, {"t_end": 0.05})
    out = tmp_path / "out"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    report = json.loads((out / "run_report.json").read_text())
    assert report["phases"]["full_cycle"] is False
    assert report["phases"]["note"] == "incomplete cycle"


def test_missing_config_file_is_input_error(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path / "o")]) == 1
