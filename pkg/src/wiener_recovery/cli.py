"""Typer commands of the experiment harness."""

import traceback
from pathlib import Path
from typing import Callable

import typer

from ._harness import (
    CONFIG_ERROR_EXIT_CODE,
    NUMERICAL_FAILURE_EXIT_CODE,
    ConfigError,
    NumericalFailure,
    Writer,
)
from .application.experiments import (
    BoundTableExperiment,
    ExperimentOutcome,
    LowerBoundExperiment,
    PhaseTransitionExperiment,
    RecoveryExperiment,
)
from .application.protocols import Experiment
from .domain.errors import RecoveryError
from .infrastructure.config import ExperimentConfig, config_hash, load_config
from .infrastructure.protocols import ReportRepository, TrialRunner
from .infrastructure.results import CSVReportRepository
from .infrastructure.trial_runner import ThreadedTrialRunner

app = typer.Typer(help="Sparse recovery experiments on Wiener-algebra function classes")

ExperimentFactory = Callable[[ExperimentConfig, TrialRunner, bool], Experiment]

CONFIG_OPTION = typer.Option(
    None, "--config", "-c", help="Path to a JSON experiment config"
)
SEED_OPTION = typer.Option(
    None, "--seed", "-s", min=0, help="Base seed overriding the config"
)
THREADS_OPTION = typer.Option(
    1, "--threads", "-j", min=1, help="Worker threads for trials"
)
ALLOW_OPTION = typer.Option(
    False,
    "--allow-nonconverged",
    help="Exit 0 even if some solver runs did not converge",
)
VERBOSE_OPTION = typer.Option(
    False, "--verbose/--quiet", "-v/-q", help="Control verbosity of output"
)
TIMINGS_OPTION = typer.Option(
    False,
    "--record-timings",
    help="Fill the wall_ms column (reruns are then no longer byte-identical)",
)


def _out_option(default: str) -> Path:
    return typer.Option(
        Path(default),
        "--out",
        "-o",
        help="Output path; .csv and .json are written next to it",
    )


def _load(config_path: Path | None, seed: int | None) -> ExperimentConfig:
    config = ExperimentConfig() if config_path is None else load_config(config_path)
    return config.with_overrides(seed=seed)


def _summary_lines(
    outcome: ExperimentOutcome, csv_path: Path, json_path: Path | None
) -> list[str]:
    lines = [f"Rows written: {len(outcome.rows)}"]
    if outcome.statuses:
        converged = len(outcome.statuses) - outcome.nonconverged
        lines.append(f"Solver runs converged: {converged}/{len(outcome.statuses)}")
    lines.append(f"Results saved to: {csv_path}")
    if json_path is not None:
        lines.append(f"Report saved to: {json_path}")
    return lines


def _require_converged(outcome: ExperimentOutcome, allow_nonconverged: bool) -> None:
    if outcome.nonconverged and not allow_nonconverged:
        raise NumericalFailure(
            f"{outcome.nonconverged} solver run(s) did not converge; "
            "pass --allow-nonconverged to accept"
        )


def run_command(
    title: str,
    factory: ExperimentFactory,
    config_path: Path | None,
    seed: int | None,
    out: Path,
    threads: int,
    allow_nonconverged: bool,
    verbose: bool,
    record_timings: bool = False,
) -> ExperimentOutcome:
    """
    Load the config, run one experiment and persist its outputs.

    Raises:
        typer.Exit: 2 on configuration errors, 3 on numerical failures and
            on non-converged solver runs unless allow_nonconverged is set
    """
    writer = Writer(verbose)
    try:
        config = _load(config_path, seed)
        writer.echo(f"🔬 {title}: base seed {config.seed}, {threads} thread(s)")
        experiment = factory(config, ThreadedTrialRunner(threads), record_timings)
        outcome = experiment.run()
    except ConfigError as e:
        writer.error(str(e))
        raise typer.Exit(CONFIG_ERROR_EXIT_CODE)
    except RecoveryError as e:
        writer.error(str(e))
        raise typer.Exit(NUMERICAL_FAILURE_EXIT_CODE)
    except Exception as e:
        writer.error(f"unexpected failure: {e}")
        if verbose:
            writer.always_echo(traceback.format_exc(), markup=False)
        raise typer.Exit(NUMERICAL_FAILURE_EXIT_CODE)

    repository: ReportRepository = CSVReportRepository(
        config_hash(config), outcome.seeds
    )
    csv_path = out.with_suffix(".csv")
    repository.save_table(outcome.rows, outcome.columns, csv_path)
    json_path = None
    if outcome.report is not None:
        json_path = out.with_suffix(".json")
        repository.save_report(outcome.report, json_path)

    writer.echo(f"[green]✓[/green] {title} finished ({len(outcome.rows)} rows)")
    for warning in outcome.warnings:
        writer.warn(warning)
    writer.summary(
        f"📊 {title.upper()} SUMMARY", _summary_lines(outcome, csv_path, json_path)
    )

    try:
        _require_converged(outcome, allow_nonconverged)
    except NumericalFailure as e:
        writer.error(str(e))
        raise typer.Exit(NUMERICAL_FAILURE_EXIT_CODE)
    return outcome


@app.command(name="recover")
def recover_command(
    config: Path | None = CONFIG_OPTION,
    seed: int | None = SEED_OPTION,
    out: Path = _out_option("results/recover"),
    threads: int = THREADS_OPTION,
    allow_nonconverged: bool = ALLOW_OPTION,
    verbose: bool = VERBOSE_OPTION,
    record_timings: bool = TIMINGS_OPTION,
) -> None:
    """
    Recover extremal class members for every (ε, trial) of the config.

    Each row holds the plan (s, #Λ, m), the measured L_p error, the
    error bound it is compared with and the solver status.
    """
    run_command(
        "Recovery",
        lambda cfg, runner, timings: RecoveryExperiment(cfg, runner, timings),
        config,
        seed,
        out,
        threads,
        allow_nonconverged,
        verbose,
        record_timings,
    )


@app.command(name="phase-transition")
def phase_transition_command(
    config: Path | None = CONFIG_OPTION,
    seed: int | None = SEED_OPTION,
    out: Path = _out_option("results/phase_transition"),
    threads: int = THREADS_OPTION,
    allow_nonconverged: bool = ALLOW_OPTION,
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """Sweep (s, m) over planted sparse vectors and tabulate success rates."""
    run_command(
        "Phase transition",
        lambda cfg, runner, _: PhaseTransitionExperiment(cfg, runner),
        config,
        seed,
        out,
        threads,
        allow_nonconverged,
        verbose,
    )


@app.command(name="lower-bound")
def lower_bound_command(
    config: Path | None = CONFIG_OPTION,
    seed: int | None = SEED_OPTION,
    out: Path = _out_option("results/lower_bound"),
    threads: int = THREADS_OPTION,
    allow_nonconverged: bool = ALLOW_OPTION,
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """Compare rank-n linear reconstructions with ℓ1 recovery on cube(d, 2)."""
    run_command(
        "Lower bound",
        lambda cfg, runner, _: LowerBoundExperiment(cfg, runner),
        config,
        seed,
        out,
        threads,
        allow_nonconverged,
        verbose,
    )


@app.command(name="bound-table")
def bound_table_command(
    config: Path | None = CONFIG_OPTION,
    seed: int | None = SEED_OPTION,
    out: Path = _out_option("results/bound_table"),
    threads: int = THREADS_OPTION,
    allow_nonconverged: bool = ALLOW_OPTION,
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """Tabulate truncation plans, sample counts and complexity shapes."""
    run_command(
        "Bound table",
        lambda cfg, runner, _: BoundTableExperiment(cfg, runner),
        config,
        seed,
        out,
        threads,
        allow_nonconverged,
        verbose,
    )
