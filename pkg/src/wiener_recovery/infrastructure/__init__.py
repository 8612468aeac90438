"""Infrastructure layer: configuration, result persistence and worker pools."""

from .config import ExperimentConfig, config_hash, load_config, parse_config
from .protocols import ReportRepository, TrialRunner
from .results import CSVReportRepository
from .trial_runner import SerialTrialRunner, ThreadedTrialRunner

__all__ = [
    "CSVReportRepository",
    "ExperimentConfig",
    "ReportRepository",
    "SerialTrialRunner",
    "ThreadedTrialRunner",
    "TrialRunner",
    "config_hash",
    "load_config",
    "parse_config",
]
