"""Application protocols for the experiment harness."""

from typing import TYPE_CHECKING, Protocol

if TYPE_CHECKING:
    from .experiments import ExperimentOutcome


class Experiment(Protocol):
    """Protocol for an experiment behind one CLI command."""

    def run(self) -> "ExperimentOutcome":
        """
        Execute every trial of the experiment.

        Returns:
            ExperimentOutcome with rows in config order and solver statuses
        """
        ...
