"""Application layer: experiment orchestration."""

from .experiments import (
    BoundTableExperiment,
    ExperimentOutcome,
    LowerBoundExperiment,
    PhaseTransitionExperiment,
    RecoveryExperiment,
)
from .protocols import Experiment

__all__ = [
    "BoundTableExperiment",
    "Experiment",
    "ExperimentOutcome",
    "LowerBoundExperiment",
    "PhaseTransitionExperiment",
    "RecoveryExperiment",
]
