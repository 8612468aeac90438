"""Console output, exit codes and harness-level exceptions shared by the CLI."""

from typing import Any, Iterable

import rich
from rich.markup import escape

SUCCESS_EXIT_CODE = 0
CONFIG_ERROR_EXIT_CODE = 2
NUMERICAL_FAILURE_EXIT_CODE = 3
SUMMARY_RULE = "=" * 60


class ConfigError(Exception):
    """Exception raised when an experiment configuration fails validation."""

    def __init__(self, diagnostics: Iterable[str]):
        self.diagnostics = list(diagnostics)
        super().__init__(
            "invalid configuration:\n" + "\n".join(f"  - {d}" for d in self.diagnostics)
        )


class NumericalFailure(Exception):
    """Exception raised when a run ends without a certified result."""

    pass


class Writer:
    """
    A utility class for conditional writing to console based on verbosity.

    This class wraps rich.print with conditional output based on a verbose flag.
    """

    def __init__(self, verbose: bool = True):
        """Initialize the writer with the verbose flag.

        Args:
            verbose: Whether to print progress output
        """
        self.verbose = verbose

    def echo(self, message: Any, *args: Any, **kwargs: Any) -> None:
        """Print a message only in verbose mode."""
        if self.verbose:
            rich.print(message, *args, **kwargs)

    def always_echo(self, message: Any, *args: Any, **kwargs: Any) -> None:
        """Print a message regardless of verbose mode."""
        rich.print(message, *args, **kwargs)

    def error(self, message: str) -> None:
        self.always_echo(f"[red]Error:[/red] {escape(message)}")

    def warn(self, message: str) -> None:
        self.echo(f"[yellow]Warning:[/yellow] {escape(message)}")

    def summary(self, title: str, lines: Iterable[str]) -> None:
        """Print a ruled summary block."""
        self.always_echo(f"\n{SUMMARY_RULE}")
        self.always_echo(f"[bold]{title}[/bold]")
        self.always_echo(SUMMARY_RULE)
        for line in lines:
            self.always_echo(line)
        self.always_echo(SUMMARY_RULE)
