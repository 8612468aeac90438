"""Integration tests for the experiment commands."""

import json
from pathlib import Path

import pytest
from typer.testing import CliRunner

from wiener_recovery.cli import app
from wiener_recovery.infrastructure.config import config_hash, load_config
from wiener_recovery.infrastructure.results import (
    ARTIFACT_VERSION,
    CSVReportRepository,
)

SMOKE_CONFIG = Path(__file__).parent.parent.parent / "configs" / "smoke.json"
SMOKE = ["--config", str(SMOKE_CONFIG)]

pytestmark = pytest.mark.integration


@pytest.fixture
def runner():
    return CliRunner()


def write_config(path: Path, payload: dict) -> Path:
    path.write_text(json.dumps(payload))
    return path


class TestRecoverCommand:
    """Test the recover command end to end."""

    def test_smoke(self, runner, tmp_path):
        """Test the smoke config: three converged rows and a JSON report."""
        out = tmp_path / "recover"

        result = runner.invoke(app, ["recover", *SMOKE, "--out", str(out)])

        assert result.exit_code == 0, result.output
        table = CSVReportRepository.load_table(out.with_suffix(".csv"))
        assert len(table) == 3
        assert set(table["solver_status"]) == {"converged"}
        assert set(table["m"]) == {29}
        assert set(table["cardinality"]) == {225}
        assert table["wall_ms"].isna().all()
        report = json.loads(out.with_suffix(".json").read_text())
        assert "calibration" not in report

    def test_provenance_header(self, runner, tmp_path):
        """Test that the CSV header carries the config hash and seeds."""
        out = tmp_path / "recover"

        runner.invoke(
            app, ["recover", *SMOKE, "--out", str(out), "--allow-nonconverged"]
        )

        header = CSVReportRepository.load_header(out.with_suffix(".csv"))
        assert header["artifact_version"] == ARTIFACT_VERSION
        assert header["config_hash"] == config_hash(load_config(SMOKE_CONFIG))
        assert len(header["seeds"].split()) == 3

    def test_byte_identical_reruns(self, runner, tmp_path):
        """Test that reruns with different thread counts write identical bytes."""
        first, second = tmp_path / "first", tmp_path / "second"
        base = ["recover", *SMOKE, "--allow-nonconverged"]

        runner.invoke(app, base + ["--out", str(first), "--threads", "1"])
        runner.invoke(app, base + ["--out", str(second), "--threads", "3"])

        for suffix in (".csv", ".json"):
            first_bytes = first.with_suffix(suffix).read_bytes()
            assert first_bytes == second.with_suffix(suffix).read_bytes()

    def test_seed_override_changes_rows(self, runner, tmp_path):
        """Test that --seed overrides the config seed."""
        out = tmp_path / "recover"

        runner.invoke(
            app,
            ["recover", *SMOKE, "--out", str(out), "--seed", "5"]
            + ["--allow-nonconverged"],
        )

        table = CSVReportRepository.load_table(out.with_suffix(".csv"))
        assert list(table["seed"]) == [5, 4, 7]

    def test_missing_config(self, runner, tmp_path):
        """Test that a missing config exits with code 2."""
        absent = tmp_path / "absent.json"

        result = runner.invoke(app, ["recover", "--config", str(absent)])

        assert result.exit_code == 2
        assert "Error:" in result.output

    def test_invalid_config_writes_nothing(self, runner, tmp_path):
        """Test that validation failures stop before any output is written."""
        config = write_config(
            tmp_path / "bad.json", {"version": 1, "d": 0, "bogus": 1}
        )
        out = tmp_path / "recover"

        result = runner.invoke(
            app, ["recover", "--config", str(config), "--out", str(out)]
        )

        assert result.exit_code == 2
        assert "bogus: unknown key" in result.output
        assert not out.with_suffix(".csv").exists()

    def test_cardinality_cap_is_numerical_failure(self, runner, tmp_path):
        """Test that planning beyond the caps exits with code 3."""
        config = write_config(
            tmp_path / "capped.json",
            {
                "version": 1,
                "d": 2,
                "epsilons": [0.5],
                "c_universal": 0.5,
                "caps": {"cardinality": 100},
            },
        )
        out = tmp_path / "r"

        result = runner.invoke(
            app, ["recover", "--config", str(config), "--out", str(out)]
        )

        assert result.exit_code == 3

    def test_nonconverged_runs_exit_three(self, runner, tmp_path):
        """Test that a starved solver fails the run unless it is allowed."""
        payload = json.loads(SMOKE_CONFIG.read_text())
        payload["solver"] = {"gap_tol": 1e-15, "max_iter": 1, "check_every": 1}
        config = write_config(tmp_path / "starved.json", payload)
        out = tmp_path / "recover"

        refused = runner.invoke(
            app, ["recover", "--config", str(config), "--out", str(out)]
        )
        allowed = runner.invoke(
            app,
            ["recover", "--config", str(config), "--out", str(out)]
            + ["--allow-nonconverged"],
        )

        assert refused.exit_code == 3
        assert "--allow-nonconverged" in refused.output
        assert allowed.exit_code == 0, allowed.output

    def test_wiener_ball_without_plan_exits_two(self, runner, tmp_path):
        """Test that recover refuses the Wiener ball unless a plan is fixed."""
        config = write_config(
            tmp_path / "ball.json", {"version": 1, "class": {"variant": "wiener"}}
        )
        out = tmp_path / "recover"

        result = runner.invoke(
            app, ["recover", "--config", str(config), "--out", str(out)]
        )

        assert result.exit_code == 2
        assert "fixed_plan" in result.output
        assert not out.with_suffix(".csv").exists()

    def test_calibration_section_reaches_report(self, runner, tmp_path):
        """Test that an enabled calibration is recorded in the JSON report."""
        payload = json.loads(SMOKE_CONFIG.read_text())
        payload["trials"] = 1
        payload["calibration"] = {
            "enabled": True,
            "members": 1,
            "seeds": 1,
            "max_doublings": 1,
        }
        config = write_config(tmp_path / "calibrated.json", payload)
        out = tmp_path / "recover"

        result = runner.invoke(
            app,
            ["recover", "--config", str(config), "--out", str(out)]
            + ["--allow-nonconverged"],
        )

        assert result.exit_code == 0, result.output
        report = json.loads(out.with_suffix(".json").read_text())
        assert len(report["calibration"]) == 1
        assert report["calibration"][0]["base_m"] == 29
        assert report["calibration"][0]["factor"] in (1, 2)


class TestLowerBoundCommand:
    """Test the lower-bound command."""

    def test_default_run(self, runner, tmp_path):
        """Test the smoke lower-bound grid."""
        out = tmp_path / "lower"

        result = runner.invoke(app, ["lower-bound", *SMOKE, "--out", str(out)])

        assert result.exit_code == 0, result.output
        table = CSVReportRepository.load_table(out.with_suffix(".csv"))
        assert list(table["n_rank"]) == [0, 6]
        gap = table["linear_worst_case"] - table["gluskin_bound"]
        assert (gap >= -1e-9).all()
        assert out.with_suffix(".json").exists()

    def test_refuses_dimension_four(self, runner, tmp_path):
        """Test that d = 4 exceeds the default cap and exits with code 2."""
        config = write_config(
            tmp_path / "d4.json",
            {"version": 1, "lower_bound": {"d": 4, "ranks": [10]}},
        )
        out = tmp_path / "lower"

        result = runner.invoke(
            app, ["lower-bound", "--config", str(config), "--out", str(out)]
        )

        assert result.exit_code == 2
        assert "caps.lower_bound" in result.output
        assert not out.with_suffix(".csv").exists()

    def test_runs_with_wiener_ball_class(self, runner, tmp_path):
        """Test that a Wiener-ball class only constrains the recover command."""
        config = write_config(
            tmp_path / "ball.json",
            {
                "version": 1,
                "class": {"variant": "wiener"},
                "lower_bound": {"d": 1, "ranks": [0, 2], "bpdn_samples": 10},
            },
        )
        out = tmp_path / "lower"

        result = runner.invoke(
            app,
            ["lower-bound", "--config", str(config), "--out", str(out)]
            + ["--allow-nonconverged"],
        )

        assert result.exit_code == 0, result.output
        assert "fixed_plan" not in result.output


class TestOtherCommands:
    """Test the phase-transition and bound-table commands."""

    def test_phase_transition(self, runner, tmp_path):
        """Test one row per (s, m) cell."""
        out = tmp_path / "phase"

        result = runner.invoke(
            app,
            ["phase-transition", *SMOKE, "--out", str(out), "--allow-nonconverged"],
        )

        assert result.exit_code == 0, result.output
        table = CSVReportRepository.load_table(out.with_suffix(".csv"))
        assert len(table) == 4
        assert table["success_rate"].between(0, 1).all()

    def test_bound_table(self, runner, tmp_path):
        """Test one row per (class, d, ε, p)."""
        out = tmp_path / "bounds"

        result = runner.invoke(app, ["bound-table", *SMOKE, "--out", str(out)])

        assert result.exit_code == 0, result.output
        table = CSVReportRepository.load_table(out.with_suffix(".csv"))
        assert len(table) == 4
        assert set(table["status"]) == {"ok"}
        assert not out.with_suffix(".json").exists()

    def test_defaults_without_config(self, runner, tmp_path):
        """Test that the bound table runs on the built-in defaults."""
        out = tmp_path / "bounds"

        result = runner.invoke(app, ["bound-table", "--out", str(out), "--quiet"])

        assert result.exit_code == 0, result.output
        assert "SUMMARY" in result.output
