"""End-to-end tests of the command-line interface: exit codes, formats, round trips."""

from __future__ import annotations

import csv
import io
import json

import pytest

from bornchoice import quantum, solver
from bornchoice.cli import main
from bornchoice.scenarios import builtin


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -- verify-paper -----------------------------------------------------------

def test_verify_paper_all_pass(capsys):
    code, out, err = run(capsys, ["verify-paper"])
    assert code == 0
    assert "overall: 4/4 scenarios pass" in out
    for name in ("ellsberg3", "machina5051", "reflection_lower", "reflection_upper"):
        assert f"scenario {name}: PASS" in out


def test_verify_paper_single_scenario(capsys):
    code, out, _ = run(capsys, ["verify-paper", "--scenario", "machina5051"])
    assert code == 0
    assert "overall: 1/1 scenarios pass" in out
    assert "ellsberg3" not in out


def test_verify_paper_tight_tolerance_fails(capsys):
    code, out, _ = run(capsys, ["verify-paper", "--tol", "1e-6"])
    assert code == 1
    assert "FAIL" in out


def test_verify_paper_unknown_scenario(capsys):
    code, _, err = run(capsys, ["verify-paper", "--scenario", "nonesuch"])
    assert code == 64
    assert "error" in err


def test_verify_paper_json_round_trip(capsys):
    # rebuilding the states from the emitted JSON must reproduce the
    # same verification verdict
    code, out, _ = run(capsys, ["verify-paper", "--format", "json", "--full-precision"])
    assert code == 0
    payload = json.loads(out)
    assert payload["passed"] is True
    for entry in payload["scenarios"]:
        scenario = builtin(entry["scenario"])
        sol = entry["solution"]
        w1 = quantum.state_from_polar(scenario, sol["w1"]["moduli"], sol["w1"]["phases_deg"])
        w2 = quantum.state_from_polar(scenario, sol["w2"]["moduli"], sol["w2"]["phases_deg"])
        t = sol["target"]
        target = solver.SolveTarget(
            tuple(t["pair_1"]), t["d1"], tuple(t["pair_2"]), t["d2"], t["require_orthogonal"]
        )
        report = solver.verify(scenario, w1, w2, target, tol=payload["tolerance"])
        assert report.passed == entry["passed"]


def test_verify_paper_json_round_trip_preserves_failure(capsys):
    code, out, _ = run(capsys, ["verify-paper", "--scenario", "ellsberg3",
                                "--format", "json", "--tol", "1e-6"])
    assert code == 1
    entry = json.loads(out)["scenarios"][0]
    assert entry["passed"] is False
    scenario = builtin("ellsberg3")
    sol = entry["solution"]
    w1 = quantum.state_from_polar(scenario, sol["w1"]["moduli"], sol["w1"]["phases_deg"])
    w2 = quantum.state_from_polar(scenario, sol["w2"]["moduli"], sol["w2"]["phases_deg"])
    t = sol["target"]
    target = solver.SolveTarget(
        tuple(t["pair_1"]), t["d1"], tuple(t["pair_2"]), t["d2"], t["require_orthogonal"]
    )
    assert not solver.verify(scenario, w1, w2, target, tol=1e-6).passed


def test_verify_paper_csv_format(capsys):
    code, out, _ = run(capsys, ["verify-paper", "--scenario", "ellsberg3", "--format", "csv"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert set(rows[0]) == {"scenario", "check", "deviation", "tolerance", "passed"}
    assert all(row["passed"] == "True" for row in rows)


# -- solve -------------------------------------------------------------------

def test_solve_converges(capsys):
    code, out, _ = run(capsys, ["solve", "--scenario", "ellsberg3", "--format", "json"])
    assert code == 0
    payload = json.loads(out)
    assert payload["converged"] is True
    assert all(abs(v) <= 1e-8 for v in payload["residuals"].values())


def test_solve_human_output(capsys):
    code, out, _ = run(capsys, ["solve", "--scenario", "reflection_lower"])
    assert code == 0
    assert "solve converged" in out
    assert "w1:" in out and "w2:" in out and "modulus" in out


def test_solve_unreachable_target_exits_2(capsys):
    code, out, _ = run(capsys, ["solve", "--scenario", "ellsberg3",
                                "--d1", "50", "--restarts", "4"])
    assert code == 2
    assert "did NOT converge" in out


def test_solve_rejects_bad_utility(capsys):
    code, _, err = run(capsys, ["solve", "--scenario", "ellsberg3", "--utility", "bogus"])
    assert code == 64
    assert "error" in err


def test_solve_scenario_from_file(capsys, tmp_path):
    path = tmp_path / "custom.json"
    path.write_text(builtin("ellsberg3").serialize())
    code, out, _ = run(capsys, ["solve", "--scenario", str(path)])
    assert code == 0
    assert "solve converged" in out


def test_solve_malformed_scenario_file(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, _, err = run(capsys, ["solve", "--scenario", str(path)])
    assert code == 65
    assert "error" in err


def test_solve_csv_row(capsys):
    code, out, _ = run(capsys, ["solve", "--scenario", "ellsberg3", "--format", "csv"])
    assert code == 0
    [row] = list(csv.DictReader(io.StringIO(out)))
    assert row["converged"] == "True"
    assert "w1_modulus_R" in row and "residual_target_1" in row


# -- feasibility --------------------------------------------------------------

def test_feasibility_infeasible_pattern(capsys):
    code, out, _ = run(capsys, ["feasibility", "f1>f2,f4>f3", "--scenario", "ellsberg3"])
    assert code == 0  # a decided question is a success, whatever the verdict
    assert "pattern is INFEASIBLE" in out
    assert "negative multiple" in out


def test_feasibility_feasible_pattern(capsys):
    code, out, _ = run(capsys, ["feasibility", "f1>f2,f3>f4", "--scenario", "ellsberg3"])
    assert code == 0
    assert "pattern is FEASIBLE" in out
    assert "witness" in out


def test_feasibility_unknown_act(capsys):
    code, _, err = run(capsys, ["feasibility", "f1>f9,f3>f4", "--scenario", "ellsberg3"])
    assert code == 64
    assert "unknown act" in err


def test_feasibility_incomplete_pattern(capsys):
    code, _, err = run(capsys, ["feasibility", "f1>f2", "--scenario", "ellsberg3"])
    assert code == 64
    assert "error" in err


def test_feasibility_json_payload(capsys):
    code, out, _ = run(capsys, ["feasibility", "f1>f2,f4>f3",
                                "--scenario", "machina5051", "--format", "json"])
    assert code == 0
    payload = json.loads(out)
    assert payload["feasible"] is False
    assert payload["u_independent"] is True
    assert payload["grid_agrees"] is True


# -- analyze -------------------------------------------------------------------

def test_analyze_bundled_table(capsys):
    code, out, _ = run(capsys, ["analyze"])
    assert code == 0
    # the bundled rows pick up the built-in scenarios in order
    for name in ("ellsberg3", "machina5051", "reflection_lower", "reflection_upper"):
        assert f"scenario {name}:" in out
    assert "FLAG" in out


def test_analyze_inline_cells(capsys):
    code, out, _ = run(capsys, ["analyze", "--cells", "125,38,6,31",
                                "--scenario", "ellsberg3"])
    assert code == 0
    assert "163/200 prefer f1" in out


def test_analyze_cells_without_scenario(capsys):
    code, out, _ = run(capsys, ["analyze", "--cells", "10,20,30,40"])
    assert code == 0
    assert "(no scenario context)" in out
    assert "FLAG" not in out


def test_analyze_rejects_malformed_cells(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "--cells", "1,2,3"])
    assert exc.value.code == 64
    code, _, err = run(capsys, ["analyze", "--cells", "1,2,3,-4"])
    assert code == 64
    assert "error" in err


def test_analyze_counts_file(capsys, tmp_path):
    path = tmp_path / "counts.csv"
    path.write_text(
        "scenario,n_f1f4,n_f1f3,n_f2f3,n_f2f4\n"
        "ellsberg3,125,38,6,31\n"
        ",10,20,30,40\n"
    )
    code, out, _ = run(capsys, ["analyze", "--counts", str(path)])
    assert code == 0
    assert "scenario ellsberg3:" in out
    assert "(no scenario context)" in out


def test_analyze_empty_counts_file(capsys, tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("n_f1f4,n_f1f3,n_f2f3,n_f2f4\n")
    code, _, err = run(capsys, ["analyze", "--counts", str(path)])
    assert code == 65
    assert "no rows" in err


def test_analyze_missing_counts_file(capsys, tmp_path):
    code, _, err = run(capsys, ["analyze", "--counts", str(tmp_path / "absent.csv")])
    assert code == 65
    assert "cannot read" in err


def test_analyze_cells_and_counts_conflict(capsys, tmp_path):
    path = tmp_path / "counts.csv"
    path.write_text("n_f1f4,n_f1f3,n_f2f3,n_f2f4\n1,2,3,4\n")
    code, _, err = run(capsys, ["analyze", "--cells", "1,2,3,4", "--counts", str(path)])
    assert code == 64
    assert "mutually exclusive" in err


def test_analyze_csv_output(capsys):
    code, out, _ = run(capsys, ["analyze", "--format", "csv"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 4
    assert rows[0]["scenario"] == "ellsberg3"
    assert rows[0]["weight_q1"] == "0.815"


# -- output plumbing -------------------------------------------------------------

def test_out_writes_file_instead_of_stdout(capsys, tmp_path):
    path = tmp_path / "report.json"
    code, out, _ = run(capsys, ["analyze", "--cells", "125,38,6,31",
                                "--format", "json", "--out", str(path)])
    assert code == 0
    assert out == ""
    payload = json.loads(path.read_text())
    assert payload["command"] == "analyze"


def test_json_rounds_to_six_significant_digits(capsys):
    args = ["verify-paper", "--scenario", "ellsberg3", "--format", "json"]
    _, rounded_out, _ = run(capsys, args)
    _, full_out, _ = run(capsys, args + ["--full-precision"])
    rounded = json.loads(rounded_out)["scenarios"][0]["solution"]["w1"]["moduli"]
    full = json.loads(full_out)["scenarios"][0]["solution"]["w1"]["moduli"]
    assert rounded != full
    assert rounded == [float(f"{v:.6g}") for v in full]


def test_human_and_json_agree_to_six_digits(capsys):
    args = ["analyze", "--cells", "125,38,6,31", "--scenario", "ellsberg3"]
    _, human, _ = run(capsys, args)
    _, json_out, _ = run(capsys, args + ["--format", "json", "--full-precision"])
    report = json.loads(json_out)["reports"][0]
    for value in (
        report["weight_q1"],
        report["inversion_rate"],
        report["question_variants"]["q1"]["z_test"],
        report["cross_test"]["mcnemar_exact"],
    ):
        assert f"{value:.6g}" in human


def test_usage_errors_exit_64(capsys):
    for argv in ([], ["frobnicate"], ["solve"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 64


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "bornchoice" in capsys.readouterr().out
