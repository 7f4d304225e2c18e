"""Tests for CLI commands."""

import csv
import json

import pytest
from typer.testing import CliRunner

from terrace_lab import app
from terrace_lab.config import THREADS_ENV_VAR


runner = CliRunner()


# =============================================================================
# CLI App Tests
# =============================================================================


def test_cli_app_exists():
    """Test that CLI app is properly initialized."""
    assert app is not None
    assert hasattr(app, "command")


def test_cli_help_command():
    """Test that --help lists every command."""
    result = runner.invoke(app, ["--help"])
    assert result.exit_code == 0
    for name in ("predict", "simulate", "wave", "verify-barriers", "sweep", "version"):
        assert name in result.stdout


def test_version_command():
    """Test version command shows version information."""
    result = runner.invoke(app, ["version"])
    assert result.exit_code == 0
    assert "numpy" in result.stdout


# =============================================================================
# Predict Command Tests
# =============================================================================


def test_predict_default_parameters():
    """Test that the default parameters predict the accelerated case."""
    result = runner.invoke(app, ["predict"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["boundary"] is False
    assert payload["c_llw_source"] == "linear_determinacy"
    prediction = payload["prediction"]
    assert prediction["case_id"] == "accelerated"
    assert prediction["c1_star"] == pytest.approx(2.2)
    assert prediction["c2_star"] == pytest.approx(1.6655036, rel=1e-6)


def test_predict_llw_case():
    """Test that a fast v leaves the second front at c_LLW."""
    result = runner.invoke(app, ["predict", "-r", "9"])
    assert result.exit_code == 0
    prediction = json.loads(result.stdout)["prediction"]
    assert prediction["case_id"] == "llw"
    assert prediction["c2_star"] == pytest.approx(2.0**0.5)


def test_predict_estimates_c_llw_when_undetermined(mocker):
    """Test that c_LLW is simulated when neither linear-determinacy test holds."""
    estimate = mocker.patch("terrace_lab.waves.estimate_c_llw", return_value=1.6)
    result = runner.invoke(app, ["predict", "-b", "3"])
    assert result.exit_code == 0, result.stdout
    estimate.assert_called_once()
    payload = json.loads(result.stdout)
    assert payload["c_llw_source"] == "simulation"
    assert payload["c_llw"] == 1.6
    assert payload["prediction"]["case_id"] == "accelerated"


def test_predict_given_c_llw_skips_estimate(mocker):
    """Test that --c-llw is used as given."""
    estimate = mocker.patch("terrace_lab.waves.estimate_c_llw")
    result = runner.invoke(app, ["predict", "-b", "3", "--c-llw", "1.9"])
    assert result.exit_code == 0, result.stdout
    estimate.assert_not_called()
    assert json.loads(result.stdout)["c_llw_source"] == "given"


def test_predict_boundary_exits_2():
    """Test that 2√(rd) = 2 is reported as a boundary case with exit code 2."""
    result = runner.invoke(app, ["predict", "-r", "1", "-d", "1"])
    assert result.exit_code == 2
    payload = json.loads(result.stdout)
    assert payload["boundary"] is True
    assert "prediction" not in payload


def test_predict_out_of_regime():
    """Test that a ≥ 1 is refused."""
    result = runner.invoke(app, ["predict", "-a", "1.2"])
    assert result.exit_code == 1
    assert "Error:" in result.stdout


# =============================================================================
# Simulate Command Tests
# =============================================================================


def test_simulate_quick_scenario(tmp_path, scenario_file):
    """Test that a scenario run writes its artifacts and passes."""
    out = tmp_path / "out"
    result = runner.invoke(
        app, ["simulate", "--config", str(scenario_file), "--out-dir", str(out)]
    )
    assert result.exit_code == 0, result.stdout
    summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
    assert summary["scenario"] == "quick"
    assert summary["passed"] is True
    assert (out / "fronts.csv").exists()


def test_simulate_failing_criterion_exits_1(tmp_path, scenario_data):
    """Test that an unmet criterion gives exit code 1 but still writes the summary."""
    scenario_data["analyses"] = [{"kind": "sup_v", "max": 0.1}]
    path = tmp_path / "strict.json"
    path.write_text(json.dumps(scenario_data), encoding="utf-8")
    out = tmp_path / "out"
    result = runner.invoke(app, ["simulate", "-c", str(path), "-o", str(out)])
    assert result.exit_code == 1
    summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
    assert summary["passed"] is False


def test_simulate_names_malformed_field(tmp_path, scenario_data):
    """Test that a malformed field is named in the error."""
    scenario_data["solver"]["dt"] = "small"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(scenario_data), encoding="utf-8")
    result = runner.invoke(app, ["simulate", "--config", str(path)])
    assert result.exit_code != 0
    assert "solver.dt" in result.stdout


def test_simulate_requires_config():
    """Test that simulate without --config fails."""
    result = runner.invoke(app, ["simulate"])
    assert result.exit_code == 1
    assert "--config" in result.stdout


def test_simulate_lists_bundled_scenarios():
    """Test that --list prints the shipped scenarios."""
    result = runner.invoke(app, ["simulate", "--list"])
    assert result.exit_code == 0
    assert "trichotomy_case2" in result.stdout


# =============================================================================
# Sweep Command Tests
# =============================================================================


def test_sweep_classifies_small_grid(tmp_path):
    """Test that a 3 x 3 speed grid is written to region.csv."""
    out = tmp_path / "sweep"
    result = runner.invoke(
        app,
        [
            "sweep",
            "--c1-min", "2.3", "--c1-max", "3.0", "--c1-steps", "3",
            "--c2-min", "1.5", "--c2-max", "1.8", "--c2-steps", "3",
            "--out-dir", str(out),
        ],
    )
    assert result.exit_code == 0, result.stdout
    with open(out / "region.csv", encoding="utf-8", newline="") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 9
    classes = {(float(r["c1"]), float(r["c2"])): r["class"] for r in rows}
    assert classes[(3.0, 1.8)] == "interior"
    assert classes[(2.3, 1.5)] == "lower_bound_violated"
    assert all(r["measured_c1"] == "" for r in rows)


def test_sweep_vary_parameter(tmp_path):
    """Test the trichotomy map along r."""
    out = tmp_path / "vary"
    result = runner.invoke(
        app, ["sweep", "--vary", "r", "--values", "0.25,1.21,9", "--out-dir", str(out)]
    )
    assert result.exit_code == 0, result.stdout
    with open(out / "trichotomy.csv", encoding="utf-8", newline="") as f:
        cases = [r["case"] for r in csv.DictReader(f)]
    assert cases == ["extinction", "accelerated", "llw"]


def test_sweep_vary_rejects_unknown_parameter(tmp_path):
    """Test that --vary accepts only d, r, a or b."""
    result = runner.invoke(
        app, ["sweep", "--vary", "k", "--values", "1", "-o", str(tmp_path)]
    )
    assert result.exit_code == 1


def test_sweep_threads_env_must_be_integer(tmp_path, monkeypatch):
    """Test that a malformed thread override is refused."""
    monkeypatch.setenv(THREADS_ENV_VAR, "many")
    result = runner.invoke(
        app, ["sweep", "--c1-steps", "1", "--c2-steps", "1", "-o", str(tmp_path)]
    )
    assert result.exit_code == 1
    assert THREADS_ENV_VAR in result.stdout


# =============================================================================
# Wave & Verify-Barriers Command Tests
# =============================================================================


def test_wave_writes_profile(tmp_path):
    """Test that the wave command writes the profile and its report."""
    out = tmp_path / "wave"
    result = runner.invoke(
        app, ["wave", "--c", "1.8", "--truncation", "100", "-o", str(out)]
    )
    assert result.exit_code == 0, result.stdout
    report = json.loads((out / "wave.json").read_text(encoding="utf-8"))
    assert report["monotone"] is True
    assert report["decay"]["plus"]["predicted"] == pytest.approx(0.343224, rel=1e-5)
    assert (out / "profile.csv").exists()


def test_wave_subcritical_speed_fails(tmp_path):
    """Test that a speed below c_LLW exits with an error."""
    result = runner.invoke(app, ["wave", "--c", "1.0", "-o", str(tmp_path)])
    assert result.exit_code == 1
    assert "Error:" in result.stdout


def test_verify_barriers_requires_c1(tmp_path):
    """Test that terrace barriers need both speeds."""
    result = runner.invoke(app, ["verify-barriers", "--c2", "1.8", "-o", str(tmp_path)])
    assert result.exit_code == 1
    assert "--c1" in result.stdout


def test_verify_barriers_reports_violated_hypothesis(tmp_path):
    """Test that δ outside (0, 1/2) is reported by error type."""
    result = runner.invoke(
        app,
        [
            "verify-barriers",
            "--c1",
            "3",
            "--c2",
            "1.8",
            "--delta",
            "0.6",
            "-o",
            str(tmp_path),
        ],
    )
    assert result.exit_code == 1
    assert "HypothesisViolated" in result.stdout


def test_verify_barriers_certifies_terrace_sub(tmp_path):
    """Test a coarse certification of the terrace sub-solution."""
    out = tmp_path / "cert"
    result = runner.invoke(
        app,
        [
            "verify-barriers",
            "--which", "terrace_sub",
            "--c1", "3", "--c2", "1.8",
            "--horizon", "10", "--lattice-t", "11", "--lattice-x", "400",
            "-o", str(out),
        ],
    )
    assert result.exit_code == 0, result.stdout
    certificate = json.loads((out / "certificate.json").read_text(encoding="utf-8"))
    assert certificate["certified"] is True
    assert certificate["which"] == "terrace_sub"
    assert (out / "interfaces.csv").exists()
