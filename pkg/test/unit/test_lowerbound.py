"""Unit tests for linear worst-case errors and the linear versus ℓ1 separation."""

import math

import numpy as np
import pytest

from wiener_recovery.domain.errors import CardinalityCapError, InvalidProblemError
from wiener_recovery.domain.lowerbound import (
    HALF_THRESHOLD_FLAG,
    curse_demo,
    gluskin_bound,
    linear_reconstruction,
    random_rank_matrix,
    worst_case_l1ball_error,
)
from wiener_recovery.domain.models import LinearAlgorithmMatrix, SolverStatus
from wiener_recovery.domain.multiindex import cube_index_set
from wiener_recovery.domain.sampling import draw_uniform, generator, measurement_matrix


class TestWorstCase:
    """Test the exact ℓ1-ball worst case of linear maps."""

    def test_zero_map(self):
        """Test that the zero map errs by 1 on the first column."""
        zero = LinearAlgorithmMatrix(np.zeros((4, 4)), 0)

        error, witness = worst_case_l1ball_error(zero)

        assert error == pytest.approx(1.0)
        assert witness == 0

    def test_identity(self):
        """Test that the identity has zero error."""
        error, _ = worst_case_l1ball_error(LinearAlgorithmMatrix(np.eye(3), 3))

        assert error == pytest.approx(0.0)

    def test_coordinate_projection(self):
        """Test that the worst column is a discarded coordinate."""
        error, witness = worst_case_l1ball_error(
            LinearAlgorithmMatrix(np.diag([1.0, 0.0, 1.0]), 2)
        )

        assert error == pytest.approx(1.0)
        assert witness == 1

    def test_matches_random_search(self):
        """Test that no random point of the ℓ1 ball beats the column maximum."""
        rng = generator(2)
        t = random_rank_matrix(6, 2, rng)
        error, _ = worst_case_l1ball_error(t)
        residual = np.eye(6) - t.matrix

        for _ in range(200):
            x = rng.standard_normal(6) + 1j * rng.standard_normal(6)
            x /= np.sum(np.abs(x))
            assert np.linalg.norm(residual @ x) <= error + 1e-12

    def test_empty_matrix(self):
        """Test that an empty matrix has no worst case."""
        with pytest.raises(InvalidProblemError):
            worst_case_l1ball_error(LinearAlgorithmMatrix(np.zeros((0, 0)), 0))


class TestRankBound:
    """Test the rank-n lower bound."""

    def test_gluskin_bound(self):
        """Test sqrt((m - n)/m)."""
        assert gluskin_bound(25, 0) == 1.0
        assert gluskin_bound(4, 3) == pytest.approx(0.5)
        with pytest.raises(ValueError):
            gluskin_bound(4, 4)

    @pytest.mark.parametrize(
        "size, rank",
        [(25, 0), (25, 6), (25, 12), (25, 24), (125, 1), (125, 62), (125, 124)],
    )
    def test_random_low_rank_maps_respect_bound(self, size, rank):
        """Test that 200 seeded rank-n maps never beat sqrt((m - n)/m)."""
        bound = gluskin_bound(size, rank)
        for seed in range(200):
            t = random_rank_matrix(size, rank, generator(seed))
            assert worst_case_l1ball_error(t)[0] >= bound - 1e-9

    def test_rank_twelve_maps_on_cube(self):
        """Test that rank-12 maps on C^25 err by at least sqrt(13/25) > 1/√2."""
        for seed in range(200):
            t = random_rank_matrix(25, 12, generator(seed))
            error, _ = worst_case_l1ball_error(t)
            assert error >= math.sqrt(13 / 25) - 1e-9
            assert error >= 1 / math.sqrt(2) - 1e-9

    def test_random_rank_matrix_rank(self):
        """Test that the declared rank is respected."""
        t = random_rank_matrix(8, 3, generator(0))

        assert t.numerical_rank == 3
        with pytest.raises(ValueError):
            random_rank_matrix(3, 4, generator(0))


class TestLinearReconstruction:
    """Test rank-n least-squares reconstruction maps."""

    def test_is_orthogonal_projection(self):
        """Test that T is a Hermitian idempotent of the requested rank."""
        matrix = measurement_matrix(cube_index_set(1, 3), draw_uniform(4, 1, seed=1))

        t = linear_reconstruction(matrix, 4)

        assert np.allclose(t.matrix, t.matrix.conj().T)
        assert np.allclose(t.matrix @ t.matrix, t.matrix)
        assert t.numerical_rank == 4

    def test_reproduces_least_squares(self):
        """Test that T x equals the minimum-norm fit to the samples of x."""
        points = draw_uniform(5, 1, seed=2)
        matrix = measurement_matrix(cube_index_set(1, 3), points).entries
        x = generator(1).standard_normal(7) + 0j

        t = linear_reconstruction(matrix, 5)

        assert np.allclose(t.matrix @ x, np.linalg.pinv(matrix) @ (matrix @ x))

    def test_rank_zero(self):
        """Test that rank 0 gives the zero map."""
        t = linear_reconstruction(np.ones((2, 3), dtype=complex), 0)

        assert np.array_equal(t.matrix, np.zeros((3, 3)))


class TestCurseDemo:
    """Test the linear versus nonlinear separation report."""

    def test_small_budget(self):
        """Test d = 2 with a budget below half of #Λ."""
        report = curse_demo(2, 6, seed=0)

        assert report.cardinality == 25
        assert report.linear_worst_case >= gluskin_bound(25, 6) - 1e-9
        assert report.half_threshold_bound == pytest.approx(1 / math.sqrt(2))
        assert report.linear_worst_case >= report.half_threshold_bound
        assert report.bound_holds
        assert report.flags == ()
        assert report.witness_weight == 1.0
        assert report.nonlinear_error < 1e-6
        assert report.solver_status is SolverStatus.CONVERGED

    def test_large_budget_flagged(self):
        """Test that budgets above 5^d/2 are flagged."""
        report = curse_demo(1, 4, seed=3, bpdn_samples=10)

        assert HALF_THRESHOLD_FLAG in report.flags
        assert report.half_threshold_bound is None

    def test_full_budget(self):
        """Test that a full budget leaves no rank bound and no error."""
        report = curse_demo(1, 5, seed=1, bpdn_samples=10)

        assert report.gluskin_bound is None
        assert report.bound_holds is None
        assert report.linear_worst_case == pytest.approx(0.0, abs=1e-9)

    def test_zero_budget(self):
        """Test that the zero map errs by exactly 1."""
        report = curse_demo(1, 0, seed=1, bpdn_samples=10)

        assert report.linear_worst_case == pytest.approx(1.0)
        assert report.witness_frequency == (-2,)

    def test_cap_refusal(self):
        """Test that d = 4 exceeds the default cap of 125."""
        with pytest.raises(CardinalityCapError):
            curse_demo(4, 10, seed=0)

    def test_budget_range(self):
        """Test that budgets beyond #Λ are rejected."""
        with pytest.raises(ValueError):
            curse_demo(1, 6, seed=0)

    def test_determinism(self):
        """Test that equal seeds give equal reports."""
        assert curse_demo(2, 6, seed=4).to_row() == curse_demo(2, 6, seed=4).to_row()
