"""Domain service protocols for sparse Fourier recovery."""

from typing import Protocol

from .models import BpdnProblem, CoefficientVector, SolverResult


class BpdnSolver(Protocol):
    """Protocol for solvers of min ‖x‖₁ subject to ‖Gx − y‖₂ ≤ η."""

    def solve(self, problem: BpdnProblem) -> SolverResult:
        """
        Solve a basis pursuit denoising problem.

        Args:
            problem: Measurement matrix, samples and noise radius

        Returns:
            SolverResult whose status tells whether the point is certified
        """
        ...


class GroundTruthGenerator(Protocol):
    """Protocol for seeded sources of test functions."""

    def generate(self, seed: int) -> CoefficientVector:
        """
        Draw one ground-truth coefficient vector.

        Args:
            seed: Philox key; equal seeds give equal vectors

        Returns:
            Coefficient vector of the generated function
        """
        ...
