"""Unit tests for the experiment orchestrators."""

import dataclasses
import math

import pytest

from wiener_recovery._harness import ConfigError, NumericalFailure
from wiener_recovery.application.experiments import (
    BOUND_TABLE_COLUMNS,
    LOWER_BOUND_COLUMNS,
    PHASE_TRANSITION_COLUMNS,
    RECOVER_COLUMNS,
    BoundTableExperiment,
    ExperimentOutcome,
    LowerBoundExperiment,
    PhaseTransitionExperiment,
    RecoveryExperiment,
)
from wiener_recovery.cli import _require_converged
from wiener_recovery.domain.models import ClassVariant, EtaMode, SolverStatus
from wiener_recovery.infrastructure.config import (
    BoundTableSettings,
    CalibrationSettings,
    ClassConfig,
    ExperimentConfig,
    FixedPlanSettings,
    GeneratorSettings,
    LowerBoundSettings,
    PhaseTransitionSettings,
)
from wiener_recovery.infrastructure.trial_runner import (
    SerialTrialRunner,
    ThreadedTrialRunner,
)


@pytest.fixture
def recovery_config():
    """A tiny noiseless recovery setup in one dimension."""
    return ExperimentConfig(
        seed=17,
        dimension=1,
        trials=2,
        eta_mode=EtaMode.TAIL,
        generator=GeneratorSettings(support_budget=2, max_freq=6),
        fixed_plan=FixedPlanSettings(truncation_radius=6, s=2, m=12),
    )


class TestRecoveryExperiment:
    """Test the recover orchestrator."""

    def test_rows_and_columns(self, recovery_config):
        """Test one row per trial with every recover column."""
        outcome = RecoveryExperiment(recovery_config, SerialTrialRunner()).run()

        assert len(outcome.rows) == 2
        assert outcome.columns == RECOVER_COLUMNS
        assert set(outcome.rows[0]) == set(RECOVER_COLUMNS)
        assert [row["trial"] for row in outcome.rows] == [0, 1]
        assert outcome.seeds == [17, 16]

    def test_noiseless_trials_converge(self, recovery_config):
        """Test that tail-mode recovery of in-range members is exact."""
        outcome = RecoveryExperiment(recovery_config, SerialTrialRunner()).run()

        assert outcome.nonconverged == 0
        assert all(row["lp_error"] < 1e-6 for row in outcome.rows)
        assert any("cheat mode" in w for w in outcome.warnings)

    def test_timings_blank_by_default(self, recovery_config):
        """Test that wall times are only recorded on request."""
        plain = RecoveryExperiment(recovery_config, SerialTrialRunner()).run()
        timed = RecoveryExperiment(
            recovery_config, SerialTrialRunner(), record_timings=True
        ).run()

        assert all(row["wall_ms"] is None for row in plain.rows)
        assert all(run["wall_time"] is None for run in plain.report["runs"])
        assert all(row["wall_ms"] >= 0 for row in timed.rows)

    def test_thread_count_does_not_change_rows(self, recovery_config):
        """Test that threaded and serial runs give identical rows."""
        serial = RecoveryExperiment(recovery_config, SerialTrialRunner()).run()
        threaded = RecoveryExperiment(recovery_config, ThreadedTrialRunner(2)).run()

        assert serial.rows == threaded.rows

    def test_planned_parameters(self):
        """Test that without a fixed plan each ε gets its own plan."""
        config = ExperimentConfig(epsilons=(0.5, 0.7), c_universal=0.5)

        plans = RecoveryExperiment(config, SerialTrialRunner()).plans()

        assert [plan.epsilon for plan in plans] == [0.5, 0.7]
        assert plans[0].m == 29

    def test_wiener_ball_needs_fixed_plan(self):
        """Test that recover refuses the Wiener ball without a fixed plan."""
        config = ExperimentConfig(
            function_class=ClassConfig(variant=ClassVariant.WIENER_BALL)
        )

        with pytest.raises(ConfigError) as info:
            RecoveryExperiment(config, SerialTrialRunner()).run()

        assert "fixed_plan" in info.value.diagnostics[0]

    def test_wiener_ball_with_fixed_plan(self, recovery_config):
        """Test that a fixed plan lets recover run on the Wiener ball."""
        config = dataclasses.replace(
            recovery_config,
            function_class=ClassConfig(variant=ClassVariant.WIENER_BALL),
        )

        outcome = RecoveryExperiment(config, SerialTrialRunner()).run()

        assert len(outcome.rows) == 2
        assert {row["spec"] for row in outcome.rows} == {"wiener"}

    def test_calibration_disabled_by_default(self, recovery_config):
        """Test that reports carry no calibration record unless enabled."""
        outcome = RecoveryExperiment(recovery_config, SerialTrialRunner()).run()

        assert "calibration" not in outcome.report

    def test_calibration_rescales_plan(self, recovery_config):
        """Test that an enabled calibration sets m and lands in the report."""
        config = dataclasses.replace(
            recovery_config,
            calibration=CalibrationSettings(
                enabled=True, members=1, seeds=1, max_doublings=1
            ),
        )

        outcome = RecoveryExperiment(config, SerialTrialRunner()).run()

        (record,) = outcome.report["calibration"]
        assert record["base_m"] == 12
        assert record["factor"] in (1.0, 2.0)
        assert record["m"] == math.ceil(12 * record["factor"])
        assert record["target_rate"] == pytest.approx(1 - math.exp(-1))
        assert {row["m"] for row in outcome.rows} == {record["m"]}
        below = record["success_rate"] < record["target_rate"]
        assert below == any("calibration" in w for w in outcome.warnings)

    def test_calibrate_returns_scaled_plan(self, recovery_config):
        """Test that calibrate hands back the plan it recorded."""
        settings = CalibrationSettings(enabled=True, max_doublings=2)
        config = dataclasses.replace(recovery_config, calibration=settings)
        experiment = RecoveryExperiment(config, SerialTrialRunner())

        plan, record = experiment.calibrate(experiment.plans()[0])

        assert plan.m == record["m"]
        assert 0.0 <= record["success_rate"] <= 1.0


class TestPhaseTransitionExperiment:
    """Test the phase-transition sweep."""

    def test_full_sampling_always_succeeds(self):
        """Test that as many samples as columns recover every planted vector."""
        config = ExperimentConfig(
            phase_transition=PhaseTransitionSettings(
                dimension=1,
                truncation_radius=2,
                sparsities=(1, 2),
                sample_counts=(8,),
                trials=3,
            )
        )

        outcome = PhaseTransitionExperiment(config, SerialTrialRunner()).run()

        assert outcome.columns == PHASE_TRANSITION_COLUMNS
        assert [(row["s"], row["m"]) for row in outcome.rows] == [(1, 8), (2, 8)]
        assert all(row["success_rate"] == 1.0 for row in outcome.rows)
        assert all(row["cardinality"] == 5 for row in outcome.rows)
        assert len(outcome.statuses) == 6


class TestLowerBoundExperiment:
    """Test the lower-bound orchestrator."""

    def test_refuses_large_dimension(self):
        """Test that d = 4 is refused before any compute."""
        settings = LowerBoundSettings(dimension=4, ranks=(10,))
        config = ExperimentConfig(lower_bound=settings)

        with pytest.raises(ConfigError) as info:
            LowerBoundExperiment(config, SerialTrialRunner()).run()

        assert "caps.lower_bound" in info.value.diagnostics[0]

    def test_raised_cap_allows_dimension(self):
        """Test that the cap check follows caps.lower_bound."""
        settings = LowerBoundSettings(dimension=4, ranks=(10,))
        config = ExperimentConfig(lower_bound=settings)
        caps = dataclasses.replace(config.caps, lower_bound=625)
        config = dataclasses.replace(config, caps=caps)

        LowerBoundExperiment(config, SerialTrialRunner()).validate()

    def test_refuses_oversized_rank(self):
        """Test that ranks above #Λ are refused."""
        settings = LowerBoundSettings(dimension=1, ranks=(2, 9))
        config = ExperimentConfig(lower_bound=settings)

        with pytest.raises(ConfigError):
            LowerBoundExperiment(config, SerialTrialRunner()).run()

    def test_rows(self):
        """Test one row per rank budget."""
        settings = LowerBoundSettings(dimension=1, ranks=(0, 2, 4), bpdn_samples=10)
        config = ExperimentConfig(lower_bound=settings)

        outcome = LowerBoundExperiment(config, SerialTrialRunner()).run()

        assert outcome.columns == LOWER_BOUND_COLUMNS
        assert [row["n_rank"] for row in outcome.rows] == [0, 2, 4]
        assert outcome.rows[0]["linear_worst_case"] == pytest.approx(1.0)
        assert all(status is SolverStatus.CONVERGED for status in outcome.statuses)
        assert outcome.report is not None and len(outcome.report["rows"]) == 3


class TestBoundTableExperiment:
    """Test the bound table."""

    def test_rows_and_unsupported_classes(self):
        """Test that unsupported classes are reported in the status column."""
        config = ExperimentConfig(
            bound_table=BoundTableSettings(
                classes=(ClassConfig(), ClassConfig(variant=ClassVariant.WIENER_BALL)),
                dimensions=(1,),
                epsilons=(0.5,),
                norms=(2.0,),
            )
        )

        outcome = BoundTableExperiment(config, SerialTrialRunner()).run()

        assert outcome.columns == BOUND_TABLE_COLUMNS
        log_row, ball_row = outcome.rows
        assert log_row["status"] == "ok"
        assert log_row["truncation_radius"] == 7
        assert log_row["s"] == 16
        assert log_row["plan_truncation_radius"] == 54
        assert ball_row["status"] != "ok"
        assert "truncation_radius" not in ball_row
        assert outcome.warnings == [ball_row["status"]]

    def test_radius_cap_reported(self):
        """Test that cap refusals become row statuses instead of errors."""
        config = ExperimentConfig(
            bound_table=BoundTableSettings(
                dimensions=(1,), epsilons=(0.05,), norms=(2.0,)
            )
        )

        outcome = BoundTableExperiment(config, SerialTrialRunner()).run()

        assert "cap" in outcome.rows[0]["status"]

    def test_overflowing_radius_reported(self):
        """Test that radii beyond float range become a cap status, not a crash."""
        config = ExperimentConfig(
            c_universal=1.0,
            bound_table=BoundTableSettings(
                dimensions=(2,), epsilons=(0.05,), norms=(4.0,)
            ),
        )

        outcome = BoundTableExperiment(config, SerialTrialRunner()).run()

        (row,) = outcome.rows
        assert "exceeds the configured cap" in row["status"]
        assert "inf" in row["status"]

    def test_wiener_ball_top_level_class_is_ignored(self):
        """Test that the bound table runs when the recover class is the Wiener ball."""
        config = ExperimentConfig(
            function_class=ClassConfig(variant=ClassVariant.WIENER_BALL),
            bound_table=BoundTableSettings(
                dimensions=(1,), epsilons=(0.5,), norms=(2.0,)
            ),
        )

        outcome = BoundTableExperiment(config, SerialTrialRunner()).run()

        assert outcome.rows[0]["status"] == "ok"


class TestExperimentOutcome:
    """Test the outcome summary used by the convergence gate."""

    def test_nonconverged_counts_every_other_status(self):
        """Test that max_iter and infeasible runs both count as non-converged."""
        outcome = ExperimentOutcome(
            rows=[],
            columns=[],
            seeds=[],
            statuses=[
                SolverStatus.CONVERGED,
                SolverStatus.MAX_ITER,
                SolverStatus.INFEASIBLE_DETECTED,
            ],
        )

        assert outcome.nonconverged == 2

    def test_gate_raises_numerical_failure(self):
        """Test that non-converged runs raise unless explicitly allowed."""
        outcome = ExperimentOutcome(
            rows=[], columns=[], seeds=[], statuses=[SolverStatus.MAX_ITER]
        )

        with pytest.raises(NumericalFailure) as info:
            _require_converged(outcome, allow_nonconverged=False)

        assert "--allow-nonconverged" in str(info.value)
        _require_converged(outcome, allow_nonconverged=True)
