"""
Worst-case error of linear algorithms on ℓ1 balls and the linear versus
nonlinear separation on the cube [-2, 2]^d.
"""

import math

import numpy as np

from .errors import CardinalityCapError, InvalidProblemError
from .models import (
    ClassSpec,
    CoefficientVector,
    ComplexArray,
    LinearAlgorithmMatrix,
    MeasurementMatrix,
    SeparationReport,
    SolverConfig,
)
from .multiindex import cube_cardinality, cube_index_set
from .recovery import fixed_plan, recover
from .sampling import draw_uniform, measurement_matrix, trial_seed
from .wiener import class_weight

DEFAULT_LOWER_BOUND_CAP = 125
DEFAULT_WITNESS_SAMPLES = 40
DEFAULT_RANK_TOL = 1e-10
HALF_THRESHOLD_FLAG = "budget above 5^d/2 threshold"
WITNESS_RADIUS = 2


def worst_case_l1ball_error(t: LinearAlgorithmMatrix) -> tuple[float, int]:
    """
    max over ‖x‖₁ ≤ 1 of ‖x − Tx‖₂, together with the maximizing column.

    The maximum of a convex function over the ℓ1 ball sits at an extreme
    point ω·e_j, so it is the largest column norm of I − T. Ties go to the
    first column.
    """
    if t.size == 0:
        raise InvalidProblemError("worst-case error needs a nonempty matrix")
    residual = np.eye(t.size, dtype=np.complex128) - t.matrix
    norms = np.linalg.norm(residual, axis=0)
    witness = int(np.argmax(norms))
    return float(norms[witness]), witness


def gluskin_bound(m: int, n: int) -> float:
    """sqrt((m − n)/m), the lower bound for every rank-n linear map on C^m."""
    if not (0 <= n < m):
        raise ValueError(f"need 0 <= n < m, got m={m}, n={n}")
    return math.sqrt((m - n) / m)


def linear_reconstruction(
    matrix: MeasurementMatrix | ComplexArray,
    rank: int,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> LinearAlgorithmMatrix:
    """
    Rank-n least-squares reconstruction T = V_n V_nᴴ.

    Sampling followed by least squares on the top ``rank`` right singular
    directions of G reproduces exactly the projection onto their span.
    Singular values below rank_tol · σ_max are discarded.
    """
    entries = (
        matrix.entries if isinstance(matrix, MeasurementMatrix) else np.asarray(matrix)
    )
    cols = entries.shape[1]
    if rank < 0:
        raise ValueError(f"rank must be >= 0, got {rank}")
    if rank == 0 or entries.shape[0] == 0:
        return LinearAlgorithmMatrix(np.zeros((cols, cols), dtype=np.complex128), rank)
    _, singular, vh = np.linalg.svd(entries, full_matrices=False)
    significant = 0
    if singular[0] > 0:
        significant = int(np.sum(singular > rank_tol * singular[0]))
    keep = min(rank, significant)
    basis = vh[:keep].conj().T
    return LinearAlgorithmMatrix(basis @ basis.conj().T, rank, rank_tol)


def random_rank_matrix(
    size: int, rank: int, rng: np.random.Generator
) -> LinearAlgorithmMatrix:
    """A Gaussian complex size × size matrix of rank at most ``rank``."""
    if not (0 <= rank <= size):
        raise ValueError(f"need 0 <= rank <= size, got size={size}, rank={rank}")
    left = rng.standard_normal((size, rank)) + 1j * rng.standard_normal((size, rank))
    right = rng.standard_normal((rank, size)) + 1j * rng.standard_normal((rank, size))
    return LinearAlgorithmMatrix(left @ right, rank)


def curse_demo(
    d: int,
    n_rank: int,
    seed: int,
    bpdn_samples: int = DEFAULT_WITNESS_SAMPLES,
    cap: int = DEFAULT_LOWER_BOUND_CAP,
    cfg: SolverConfig | None = None,
) -> SeparationReport:
    """
    Pit a rank-n linear algorithm against ℓ1 recovery on Λ = cube(d, 2).

    The linear algorithm samples f at n_rank uniform points and reconstructs
    by rank-n least squares. Its exact worst case over the ℓ1 ball is computed
    column by column; the worst column is a single character b_k, which lies
    in the log class. That character is then recovered from bpdn_samples
    fresh samples by ℓ1 minimization with η = 0.

    Args:
        d: Dimension; 5^d must not exceed cap
        n_rank: Sample budget and rank of the linear algorithm, 0 <= n_rank <= 5^d
        seed: Base seed; the linear samples use it directly, the ℓ1 samples
            use the substream for trial 1
        bpdn_samples: Sample count of the nonlinear decoder
        cap: Largest admissible #Λ
        cfg: Solver settings

    Returns:
        SeparationReport; rank budgets above 5^d/2 are flagged
    """
    size = cube_cardinality(d, WITNESS_RADIUS)
    if size > cap:
        raise CardinalityCapError(f"lower-bound index set cube({d}, 2)", size, cap)
    if not (0 <= n_rank <= size):
        raise ValueError(f"rank budget must lie in [0, {size}], got {n_rank}")
    index_set = cube_index_set(d, WITNESS_RADIUS)

    if n_rank == 0:
        linear = linear_reconstruction(np.zeros((0, size), dtype=np.complex128), 0)
    else:
        points = draw_uniform(n_rank, d, seed)
        linear = linear_reconstruction(measurement_matrix(index_set, points), n_rank)
    worst, position = worst_case_l1ball_error(linear)

    flags: list[str] = []
    if 2 * n_rank > size:
        flags.append(HALF_THRESHOLD_FLAG)
    bound = gluskin_bound(size, n_rank) if n_rank < size else None
    if bound is not None and worst < bound - 1e-9:
        flags.append("linear worst case below the rank bound")

    spec = ClassSpec.log_class(d)
    frequency = tuple(int(v) for v in index_set.indices[position])
    witness = CoefficientVector.from_terms(d, {frequency: 1.0})
    plan = fixed_plan(spec, WITNESS_RADIUS, s=2, m=bpdn_samples, noise_level=0.0)
    nonlinear = recover(witness, plan, trial_seed(seed, 1), cfg)

    return SeparationReport(
        dimension=d,
        n_rank=n_rank,
        cardinality=size,
        linear_worst_case=worst,
        gluskin_bound=bound,
        half_threshold_bound=1 / math.sqrt(2) if 2 * n_rank <= size else None,
        witness_position=position,
        witness_frequency=frequency,
        witness_weight=class_weight(spec, frequency),
        nonlinear_error=nonlinear.lp_error.value,
        nonlinear_samples=bpdn_samples,
        solver_status=nonlinear.solver.status,
        seed=seed,
        flags=tuple(flags),
    )
