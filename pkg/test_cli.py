import json

import pytest

from check_outputs import check_csv_text, validate_json
from detector_response import EXIT_CONFIG, EXIT_OK, run
from regime_analyzer import POINT_COLUMNS


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# ---------------------------------------------------------
# Tabellen
# ---------------------------------------------------------

def test_rho_csv(capsys):
    code, out, _ = _run(capsys, "rho", "--spectral", "causal-set", "--x", "0.5", "2", "10")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "x,rho_hat" and len(lines) == 4
    assert not check_csv_text(out, "rho")


def test_rho_output_is_deterministic(capsys):
    argv = ["rho", "--spectral", "exponential", "--alpha", "1.5", "--points", "7"]
    first = _run(capsys, *argv)[1]
    assert _run(capsys, *argv)[1] == first


def test_switching_json_matches_schema(capsys):
    code, out, _ = _run(capsys, "switching", "--switching", "lorentzian", "--points", "5", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["tail_class"] and len(doc["rows"]) == 5
    assert validate_json(doc, "switching") == []


def test_response_physical_parameters(capsys):
    code, out, _ = _run(capsys, "response", "--switching", "gaussian", "--omega", "2", "--t-window", "0.5",
                        "--mass", "0", "1", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["a"] == pytest.approx(1.0)
    assert doc["physical"]["omega"] == 2.0
    assert [r["mass"] for r in doc["rows"]] == [0.0, 1.0]
    assert doc["rows"][1]["value"] < doc["rows"][0]["value"]
    assert validate_json(doc, "response") == []


# ---------------------------------------------------------
# Relative Antwort
# ---------------------------------------------------------

def test_delta_emission_example(capsys):
    code, out, _ = _run(capsys, "delta", "--switching", "gaussian", "--spectral", "exponential",
                        "--a", "-1000", "--lambda", "1e-6")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["delta"] == pytest.approx(2.0 / 3.0 * 1e-6, rel=0.01)
    assert doc["excess"] == pytest.approx(doc["delta"] * doc["f0"], rel=1e-9)
    assert doc["regime"]["gap_sign"] == "negative"
    assert validate_json(doc, "delta") == []


def test_delta_division_guard(capsys):
    code, out, err = _run(capsys, "delta", "--switching", "sinc", "--spectral", "exponential",
                          "--a", "2", "--lambda", "1e-3")
    assert code == EXIT_CONFIG
    doc = json.loads(out)
    assert doc["delta"] is None and doc["f0"] == 0.0
    assert validate_json(doc, "delta") == []
    assert "abs_tol" in err


def test_excess_reports_asymptotic_form(capsys):
    code, out, _ = _run(capsys, "excess", "--switching", "lorentzian", "--spectral", "causal-set",
                        "--a", "-100", "--lambda", "1e-6")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["asymptotic_excess"] == pytest.approx(doc["excess"], rel=0.05)
    assert validate_json(doc, "excess") == []


def test_excess_exponential_window_short_time(capsys):
    code, out, _ = _run(capsys, "excess", "--switching", "exponential", "--spectral", "exponential",
                        "--a", "1e-3", "--lambda", "1e-5")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["converged"] and doc["excess"] > 0
    assert doc["abs_error"] <= 1e-6 * doc["excess"]
    assert validate_json(doc, "excess") == []


# ---------------------------------------------------------
# Fehlerfaelle
# ---------------------------------------------------------

def test_mixed_parameterizations_rejected(capsys):
    code, _, err = _run(capsys, "delta", "--switching", "gaussian", "--a", "-10", "--lambda", "1e-3",
                        "--omega", "1e20")
    assert code == EXIT_CONFIG
    assert "--omega" in err


def test_missing_lambda_rejected(capsys):
    code, _, err = _run(capsys, "excess", "--switching", "gaussian", "--a", "-10")
    assert code == EXIT_CONFIG
    assert "--lambda" in err


def test_unknown_kind_rejected(capsys):
    code, _, _ = _run(capsys, "rho", "--spectral", "bogus")
    assert code == 2


def test_zero_threads_rejected(capsys):
    code, _, err = _run(capsys, "sweep", "--switching", "sinc", "--a", "-1", "--lambda", "1e-3",
                        "--threads", "0")
    assert code == EXIT_CONFIG
    assert "--threads" in err


# ---------------------------------------------------------
# Sweep / Plan / Report
# ---------------------------------------------------------

def test_sweep_csv(capsys):
    code, out, _ = _run(capsys, "sweep", "--switching", "sinc", "--spectral", "causal-set",
                        "--a", "-3", "-1", "--lambda", "1e-3", "2e-3", "--threads", "1")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == ",".join(POINT_COLUMNS)
    assert len(lines) == 5
    assert not check_csv_text(out, "sweep")


def test_plan_example(capsys):
    code, out, _ = _run(capsys, "plan", "--species", "Na-20", "--atoms", "6e23", "--duration", "10",
                        "--efficiency", "0.001", "--omega", "1.67e22")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["detected_events"] == pytest.approx(6e20, rel=1e-9)
    assert doc["min_delta"] == pytest.approx(1.0 / 6e20, rel=1e-9)
    assert validate_json(doc, "plan") == []


def test_plan_from_grams(capsys):
    code, out, _ = _run(capsys, "plan", "--grams", "20", "--duration", "10", "--efficiency", "0.001")
    assert code == EXIT_OK
    assert json.loads(out)["n_atoms"] == pytest.approx(6.02214076e23)


def test_plan_requires_amount(capsys):
    code, _, _ = _run(capsys, "plan", "--duration", "10")
    assert code == 2


def test_report_file(capsys, tmp_path):
    report = tmp_path / "run.json"
    out = tmp_path / "rho.csv"
    code, _, _ = _run(capsys, "rho", "--points", "3", "--out", str(out), "--report", str(report))
    assert code == EXIT_OK
    assert out.read_text(encoding="utf-8").startswith("x,rho_hat")
    doc = json.loads(report.read_text(encoding="utf-8"))
    assert doc["command"] == "rho" and doc["exit_code"] == 0 and "ts" in doc


# ---------------------------------------------------------
# Akzeptanz-Laeufe (langsam)
# ---------------------------------------------------------

@pytest.mark.slow
def test_table1_sinc_causal_set(capsys, tmp_path):
    code, out, err = _run(capsys, "table1", "--switching", "sinc", "--spectral", "causal-set",
                          "--out-dir", str(tmp_path))
    assert code == EXIT_OK
    doc = json.loads(out)
    vacuum = next(c for c in doc["reports"][0]["cells"] if c["row"] == "vacuum")
    assert vacuum["predicted_form"] == "0" and vacuum["passed"]
    assert validate_json(doc, "table1") == []
    assert (tmp_path / "table1_sinc_causal-set.csv").exists()
    assert "sinc" in err


@pytest.mark.slow
def test_fig1_panel_b(capsys, tmp_path):
    code, out, _ = _run(capsys, "fig1", "--switching", "gaussian", "--panels", "b",
                        "--out-dir", str(tmp_path), "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["passed"] and doc["panels"] == "b"
    assert validate_json(doc, "fig1") == []
