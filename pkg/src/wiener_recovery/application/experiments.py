"""Experiment orchestrators behind the four CLI commands."""

import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from wiener_recovery._harness import ConfigError
from wiener_recovery.domain.errors import CardinalityCapError, UnsupportedClassError
from wiener_recovery.domain.lowerbound import curse_demo
from wiener_recovery.domain.models import (
    BpdnProblem,
    ClassSpec,
    ClassVariant,
    RecoveryPlan,
    RecoveryReport,
    SeparationReport,
    SolverStatus,
)
from wiener_recovery.domain.multiindex import cube_cardinality, cube_index_set
from wiener_recovery.domain.recovery import (
    PlantedSparseGenerator,
    calibrate_sample_factor,
    fixed_plan,
    plan_parameters,
    recover,
    sample_count,
    sparsity_level,
)
from wiener_recovery.domain.sampling import (
    draw_uniform,
    evaluate,
    measurement_matrix,
    trial_seed,
)
from wiener_recovery.domain.solver import solve_bpdn
from wiener_recovery.domain.wiener import (
    ClassMemberGenerator,
    complexity_shape,
    plan_truncation,
    theorem_shape,
)
from wiener_recovery.infrastructure.config import ExperimentConfig
from wiener_recovery.infrastructure.protocols import TrialRunner

SAMPLE_STREAM = 1 << 32
CALIBRATION_STREAM = 1 << 33

RECOVER_COLUMNS = [
    "spec",
    "d",
    "p",
    "epsilon",
    "trial",
    "s",
    "truncation_radius",
    "cardinality",
    "m",
    "eta_mode",
    "eta",
    "lp_error",
    "lp_error_se",
    "rhs_bound",
    "within_bound",
    "certificate_gap",
    "seed",
    "solver_status",
    "wall_ms",
]

PHASE_TRANSITION_COLUMNS = [
    "d",
    "cardinality",
    "s",
    "m",
    "trials",
    "successes",
    "success_rate",
    "nonconverged",
    "seed",
]

LOWER_BOUND_COLUMNS = [
    "d",
    "n_rank",
    "cardinality",
    "linear_worst_case",
    "gluskin_bound",
    "half_threshold_bound",
    "linf_lower_bound",
    "witness",
    "nonlinear_error",
    "nonlinear_samples",
    "seed",
    "solver_status",
    "flags",
]

BOUND_TABLE_COLUMNS = [
    "spec",
    "d",
    "epsilon",
    "p",
    "truncation_radius",
    "projection_bound",
    "log_cardinality",
    "reference_log_cardinality",
    "within_reference",
    "epsilon_tilde",
    "s",
    "plan_truncation_radius",
    "plan_log_cardinality",
    "m",
    "complexity_shape",
    "theorem_shape",
    "m_over_shape",
    "status",
]


@dataclass
class ExperimentOutcome:
    """Rows, report payload and solver statuses of one command run."""

    rows: list[dict[str, Any]]
    columns: list[str]
    seeds: list[int]
    statuses: list[SolverStatus] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    report: dict[str, Any] | None = None

    @property
    def nonconverged(self) -> int:
        return sum(status is not SolverStatus.CONVERGED for status in self.statuses)


def _wall_ms(seconds: float, record_timings: bool) -> float | None:
    return seconds * 1000.0 if record_timings else None


class RecoveryExperiment:
    """Plan, sample and decode extremal class members for every (ε, trial)."""

    def __init__(
        self,
        config: ExperimentConfig,
        runner: TrialRunner,
        record_timings: bool = False,
    ):
        self.config = config
        self.runner = runner
        self.record_timings = record_timings

    def validate(self) -> None:
        """Refuse classes that recover cannot plan for, before any compute."""
        config = self.config
        wiener_ball = config.function_class.variant is ClassVariant.WIENER_BALL
        if wiener_ball and config.fixed_plan is None:
            raise ConfigError(
                [
                    "class.variant: the Wiener ball has no decaying projection bound; "
                    "recover needs an explicit fixed_plan"
                ]
            )

    def plans(self) -> list[RecoveryPlan]:
        """One plan per ε, or the single fixed plan when one is configured."""
        config = self.config
        spec = config.spec
        if config.fixed_plan is not None:
            fixed = config.fixed_plan
            return [
                fixed_plan(
                    spec,
                    fixed.truncation_radius,
                    fixed.s,
                    fixed.m,
                    gamma=config.gamma,
                    c_universal=config.c_universal,
                    p=config.p,
                    cardinality_cap=config.caps.cardinality,
                )
            ]
        return [
            plan_parameters(
                spec,
                epsilon,
                p=config.p,
                gamma=config.gamma,
                c_universal=config.c_universal,
                cardinality_cap=config.caps.cardinality,
                radius_cap=config.caps.radius,
            )
            for epsilon in config.epsilons
        ]

    def trial_seeds(self) -> list[int]:
        seed = self.config.seed
        return [trial_seed(seed, trial) for trial in range(self.config.trials)]

    def calibrate(self, plan: RecoveryPlan) -> tuple[RecoveryPlan, dict[str, Any]]:
        """
        Scale plan.m by the factor found by ``calibrate_sample_factor``.

        Calibration members and sampling seeds come from their own seed
        stream, so they never coincide with the trials.
        """
        config = self.config
        settings = config.calibration
        members = ClassMemberGenerator(
            config.spec, config.generator.support_budget, config.generator.max_freq
        )
        stream = [
            trial_seed(config.seed, CALIBRATION_STREAM + i)
            for i in range(settings.members + settings.seeds)
        ]
        factor, rate = calibrate_sample_factor(
            plan,
            [members.generate(seed) for seed in stream[: settings.members]],
            stream[settings.members :],
            cfg=config.solver,
            max_doublings=settings.max_doublings,
            eta_mode=config.eta_mode,
            quad=config.quadrature,
            entry_cap=config.caps.matrix_entries,
        )
        calibrated = replace(plan, m=max(1, math.ceil(plan.m * factor)))
        record = {
            "epsilon": plan.epsilon,
            "base_m": plan.m,
            "factor": factor,
            "success_rate": rate,
            "target_rate": 1 - plan.gamma,
            "m": calibrated.m,
        }
        return calibrated, record

    def _run_trial(self, item: tuple[RecoveryPlan, int]) -> RecoveryReport:
        plan, trial = item
        config = self.config
        seed = trial_seed(config.seed, trial)
        members = ClassMemberGenerator(
            config.spec, config.generator.support_budget, config.generator.max_freq
        )
        return recover(
            members.generate(seed),
            plan,
            trial_seed(seed, SAMPLE_STREAM),
            cfg=config.solver,
            eta_mode=config.eta_mode,
            quad=config.quadrature,
            entry_cap=config.caps.matrix_entries,
        )

    def _row(
        self, plan: RecoveryPlan, trial: int, report: RecoveryReport
    ) -> dict[str, Any]:
        return {
            "spec": plan.spec.label,
            "d": plan.spec.dimension,
            "p": plan.p,
            "epsilon": plan.epsilon,
            "trial": trial,
            "s": plan.s,
            "truncation_radius": plan.truncation_radius,
            "cardinality": len(plan.index_set),
            "m": plan.m,
            "eta_mode": report.eta_mode.value,
            "eta": report.eta_used,
            "lp_error": report.lp_error.value,
            "lp_error_se": report.lp_error.standard_error,
            "rhs_bound": report.rhs_bound,
            "within_bound": report.within_bound,
            "certificate_gap": report.solver.certificate_gap,
            "seed": trial_seed(self.config.seed, trial),
            "solver_status": report.solver.status.value,
            "wall_ms": _wall_ms(report.wall_time, self.record_timings),
        }

    def run(self) -> ExperimentOutcome:
        self.validate()
        plans = self.plans()
        calibration: list[dict[str, Any]] = []
        if self.config.calibration.enabled:
            calibrated = self.runner.run(self.calibrate, plans)
            plans = [plan for plan, _ in calibrated]
            calibration = [record for _, record in calibrated]
        items = [(plan, trial) for plan in plans for trial in range(self.config.trials)]
        reports = self.runner.run(self._run_trial, items)
        warnings = {w for report in reports for w in report.warnings}
        warnings.update(
            f"calibration reached success rate {record['success_rate']:.3g} "
            f"below the target {record['target_rate']:.3g}"
            for record in calibration
            if record["success_rate"] < record["target_rate"]
        )
        rows = [
            self._row(plan, trial, report)
            for (plan, trial), report in zip(items, reports)
        ]
        payload = {
            "command": "recover",
            "config": self.config.to_json(),
            "plans": [plan.to_json() for plan in plans],
            "runs": [report.to_json() for report in reports],
        }
        if self.config.calibration.enabled:
            payload["calibration"] = calibration
        if not self.record_timings:
            for run in payload["runs"]:
                run["wall_time"] = None
        return ExperimentOutcome(
            rows=rows,
            columns=RECOVER_COLUMNS,
            seeds=self.trial_seeds(),
            statuses=[report.solver.status for report in reports],
            warnings=sorted(warnings),
            report=payload,
        )


class PhaseTransitionExperiment:
    """Empirical success rates of exact ℓ1 recovery over an (s, m) grid."""

    def __init__(self, config: ExperimentConfig, runner: TrialRunner):
        self.config = config
        self.runner = runner
        self.settings = config.phase_transition

    def _run_trial(self, item: tuple[int, int, int]) -> tuple[bool, SolverStatus]:
        s, m, trial = item
        settings = self.settings
        index_set = cube_index_set(
            settings.dimension, settings.truncation_radius, self.config.caps.cardinality
        )
        seed = trial_seed(self.config.seed, trial)
        truth = PlantedSparseGenerator(index_set, s).generate(seed)
        points = draw_uniform(m, settings.dimension, trial_seed(seed, SAMPLE_STREAM))
        matrix = measurement_matrix(index_set, points, self.config.caps.matrix_entries)
        problem = BpdnProblem(matrix, evaluate(truth, points), 0.0)
        result = solve_bpdn(problem, self.config.solver)
        dense = np.zeros(len(index_set), dtype=np.complex128)
        dense[index_set.positions(truth.indices)] = truth.amplitudes
        relative = float(np.linalg.norm(result.x - dense) / np.linalg.norm(dense))
        return relative <= settings.success_tol, result.status

    def run(self) -> ExperimentOutcome:
        settings = self.settings
        trials = range(settings.trials)
        cells = [(s, m) for s in settings.sparsities for m in settings.sample_counts]
        items = [(s, m, trial) for s, m in cells for trial in trials]
        outcomes = self.runner.run(self._run_trial, items)
        cardinality = cube_cardinality(settings.dimension, settings.truncation_radius)
        rows = []
        for index, (s, m) in enumerate(cells):
            chunk = outcomes[index * settings.trials : (index + 1) * settings.trials]
            successes = sum(ok for ok, _ in chunk)
            rows.append(
                {
                    "d": settings.dimension,
                    "cardinality": cardinality,
                    "s": s,
                    "m": m,
                    "trials": settings.trials,
                    "successes": successes,
                    "success_rate": successes / settings.trials,
                    "nonconverged": sum(
                        status is not SolverStatus.CONVERGED for _, status in chunk
                    ),
                    "seed": self.config.seed,
                }
            )
        return ExperimentOutcome(
            rows=rows,
            columns=PHASE_TRANSITION_COLUMNS,
            seeds=[trial_seed(self.config.seed, trial) for trial in trials],
            statuses=[status for _, status in outcomes],
        )


class LowerBoundExperiment:
    """Linear worst case against ℓ1 recovery over a grid of rank budgets."""

    def __init__(self, config: ExperimentConfig, runner: TrialRunner):
        self.config = config
        self.runner = runner
        self.settings = config.lower_bound

    def validate(self) -> None:
        """Refuse dimensions or ranks outside the configured cap before any compute."""
        d = self.settings.dimension
        size = cube_cardinality(d, 2)
        cap = self.config.caps.lower_bound
        if size > cap:
            raise ConfigError(
                [
                    f"lower_bound.d: 5^{d} = {size} exceeds the configured cap "
                    f"of {cap} (caps.lower_bound)"
                ]
            )
        too_large = [rank for rank in self.settings.ranks if rank > size]
        if too_large:
            raise ConfigError([f"lower_bound.ranks: {too_large} exceed #Λ = {size}"])

    def _run_rank(self, rank: int) -> SeparationReport:
        return curse_demo(
            self.settings.dimension,
            rank,
            self.config.seed,
            bpdn_samples=self.settings.bpdn_samples,
            cap=self.config.caps.lower_bound,
            cfg=self.config.solver,
        )

    def run(self) -> ExperimentOutcome:
        self.validate()
        reports = self.runner.run(self._run_rank, list(self.settings.ranks))
        return ExperimentOutcome(
            rows=[report.to_row() for report in reports],
            columns=LOWER_BOUND_COLUMNS,
            seeds=[self.config.seed],
            statuses=[report.solver_status for report in reports],
            warnings=sorted({flag for report in reports for flag in report.flags}),
            report={
                "command": "lower-bound",
                "config": self.config.to_json(),
                "rows": [report.to_json() for report in reports],
            },
        )


class BoundTableExperiment:
    """Truncation plans, sample counts and closed-form shapes side by side."""

    def __init__(self, config: ExperimentConfig, runner: TrialRunner):
        self.config = config
        self.runner = runner

    def _row(self, item: tuple[ClassSpec, float, float]) -> dict[str, Any]:
        spec, epsilon, p = item
        config = self.config
        row: dict[str, Any] = {
            "spec": spec.label,
            "d": spec.dimension,
            "epsilon": epsilon,
            "p": p,
            "theorem_shape": theorem_shape(spec.dimension, epsilon),
            "status": "ok",
        }
        try:
            target = plan_truncation(spec, epsilon, config.caps.radius)
            epsilon_tilde = epsilon / (2 * config.c_universal)
            s = sparsity_level(epsilon_tilde, p)
            plan_epsilon = min(1.0, epsilon_tilde ** (p / 2))
            planned = plan_truncation(spec, plan_epsilon, config.caps.radius)
            m = sample_count(
                s, planned.log_cardinality, config.gamma, config.c_universal
            )
        except (UnsupportedClassError, CardinalityCapError) as error:
            row["status"] = str(error)
            return row
        shape = complexity_shape(spec, epsilon, p)
        row.update(
            {
                "truncation_radius": target.m,
                "projection_bound": target.projection_error_bound,
                "log_cardinality": target.log_cardinality,
                "reference_log_cardinality": target.reference_log_cardinality,
                "within_reference": target.within_reference,
                "epsilon_tilde": epsilon_tilde,
                "s": s,
                "plan_truncation_radius": planned.m,
                "plan_log_cardinality": planned.log_cardinality,
                "m": m,
                "complexity_shape": shape,
                "m_over_shape": (
                    m / shape if math.isfinite(shape) and shape > 0 else None
                ),
            }
        )
        return row

    def run(self) -> ExperimentOutcome:
        table = self.config.bound_table
        items = [
            (class_config.to_spec(d), epsilon, p)
            for class_config in table.classes
            for d in table.dimensions
            for epsilon in table.epsilons
            for p in table.norms
        ]
        rows = self.runner.run(self._row, items)
        return ExperimentOutcome(
            rows=rows,
            columns=BOUND_TABLE_COLUMNS,
            seeds=[self.config.seed],
            warnings=sorted({row["status"] for row in rows if row["status"] != "ok"}),
        )
