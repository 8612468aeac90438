"""Infrastructure protocols for the experiment harness."""

from pathlib import Path
from typing import Any, Callable, Mapping, Protocol, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


class TrialRunner(Protocol):
    """Protocol for executing independent trials."""

    def run(self, trial: Callable[[T], R], items: Sequence[T]) -> list[R]:
        """
        Evaluate ``trial`` on every item.

        Args:
            trial: Pure function of one work item
            items: Work items in config order

        Returns:
            Results in the order of ``items``
        """
        ...


class ReportRepository(Protocol):
    """Protocol for persisting experiment tables and reports."""

    def save_table(
        self,
        rows: Sequence[Mapping[str, Any]],
        columns: Sequence[str],
        output_path: Path,
    ) -> None:
        """
        Persist a table of rows.

        Args:
            rows: One mapping per row
            columns: Column order
            output_path: Destination file
        """
        ...

    def save_report(self, payload: Mapping[str, Any], output_path: Path) -> None:
        """
        Persist a structured report.

        Args:
            payload: JSON-serializable report body
            output_path: Destination file
        """
        ...
