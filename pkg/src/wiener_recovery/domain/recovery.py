"""
Nonlinear recovery from i.i.d. samples: parameter planning, the ℓ1 decoder and
L_p error measurement against a known ground truth.
"""

import dataclasses
import math
import time
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatchError, InvalidProblemError, NumericalFailureError
from .models import (
    BpdnProblem,
    ClassSpec,
    CoefficientVector,
    EtaMode,
    IndexSet,
    LpError,
    PointSet,
    QuadratureConfig,
    RecoveryPlan,
    RecoveryReport,
    SolverConfig,
)
from .multiindex import DEFAULT_CARDINALITY_CAP, cube_index_set
from .sampling import (
    DEFAULT_MATRIX_ENTRY_CAP,
    draw_uniform,
    evaluate,
    generator,
    measurement_matrix,
)
from .protocols import BpdnSolver
from .solver import PrimalDualSolver
from .wiener import (
    DEFAULT_RADIUS_CAP,
    coefficients_on,
    membership,
    plan_truncation,
    projection_error_bound,
    sigma_s,
    tail_wiener_norm,
    wiener_norm,
)

DEFAULT_GAMMA = math.exp(-1)
FEASIBILITY_SLACK = 1e-9
_INTEGER_SNAP = 1e-9


def sample_count(
    s: int, log_cardinality: float, gamma: float, c_universal: float
) -> int:
    """
    m = ⌈c · ln(1/γ) · s · ln³(max(s, 2)) · ln #Λ⌉, at least 1.

    Takes ln #Λ directly so large index sets never need to be built.
    """
    if s < 1:
        raise ValueError(f"sparsity must be >= 1, got {s}")
    if not (0 < gamma < 1):
        raise ValueError(f"failure probability must lie in (0, 1), got {gamma}")
    if c_universal <= 0:
        raise ValueError(f"c_universal must be positive, got {c_universal}")
    raw = c_universal * math.log(1 / gamma) * s * math.log(max(s, 2)) ** 3
    raw *= log_cardinality
    return max(1, math.ceil(raw))


def sparsity_level(epsilon_tilde: float, p: float) -> int:
    """s = ⌈ε̃^{-p}⌉ clamped to at least 2."""
    raw = epsilon_tilde ** (-p)
    nearest = round(raw)
    # 0.1**-2 evaluates to 100.00000000000001
    if abs(raw - nearest) <= _INTEGER_SNAP * max(1.0, raw):
        raw = float(nearest)
    return max(2, math.ceil(raw))


def plan_parameters(
    spec: ClassSpec,
    epsilon: float,
    p: float = 2.0,
    gamma: float = DEFAULT_GAMMA,
    c_universal: float = 1.0,
    cardinality_cap: int = DEFAULT_CARDINALITY_CAP,
    radius_cap: int = DEFAULT_RADIUS_CAP,
) -> RecoveryPlan:
    """
    Derive (Λ, s, m, η) for a target accuracy.

    Args:
        spec: Function class; the Wiener ball is rejected
        epsilon: Target L_p accuracy in (0, 1)
        p: Norm index, 2 <= p < inf
        gamma: Failure probability
        c_universal: The recovery constant c; ε̃ = ε / (2c)

    Returns:
        RecoveryPlan with Λ = cube(d, m_trunc) where m_trunc comes from
        plan_truncation(spec, ε̃^{p/2})

    Raises:
        UnsupportedClassError: For the Wiener ball
        CardinalityCapError: If the truncation radius or #Λ exceeds its cap
    """
    if not (0 < epsilon < 1):
        raise ValueError(f"target accuracy must lie in (0, 1), got {epsilon}")
    if not (2 <= p < math.inf):
        raise ValueError(f"planning needs 2 <= p < inf, got {p}")
    if c_universal <= 0:
        raise ValueError(f"c_universal must be positive, got {c_universal}")
    epsilon_tilde = epsilon / (2 * c_universal)
    s = sparsity_level(epsilon_tilde, p)
    truncation = plan_truncation(spec, min(1.0, epsilon_tilde ** (p / 2)), radius_cap)
    index_set = cube_index_set(spec.dimension, truncation.m, cardinality_cap)
    return RecoveryPlan(
        spec=spec,
        index_set=index_set,
        truncation_radius=truncation.m,
        s=s,
        m=sample_count(s, math.log(len(index_set)), gamma, c_universal),
        noise_level=truncation.projection_error_bound,
        gamma=gamma,
        c_universal=c_universal,
        p=p,
        epsilon=epsilon,
        epsilon_tilde=epsilon_tilde,
    )


def fixed_plan(
    spec: ClassSpec,
    truncation_radius: int,
    s: int,
    m: int,
    gamma: float = DEFAULT_GAMMA,
    c_universal: float = 1.0,
    p: float = 2.0,
    noise_level: float | None = None,
    cardinality_cap: int = DEFAULT_CARDINALITY_CAP,
) -> RecoveryPlan:
    """A plan with explicit truncation radius, sparsity and sample count."""
    index_set = cube_index_set(spec.dimension, truncation_radius, cardinality_cap)
    if noise_level is None:
        noise_level = projection_error_bound(spec, max(1, truncation_radius))
    return RecoveryPlan(
        spec=spec,
        index_set=index_set,
        truncation_radius=truncation_radius,
        s=s,
        m=m,
        noise_level=noise_level,
        gamma=gamma,
        c_universal=c_universal,
        p=p,
    )


def error_bound_rhs(
    s: int, p: float, sigma: float, e: float, c_universal: float = 1.0
) -> float:
    """c s^{-1/p} σ_s + c s^{1/2-1/p} E, with C_B = 1."""
    if s < 1:
        raise ValueError(f"sparsity must be >= 1, got {s}")
    inverse_p = 0.0 if math.isinf(p) else 1.0 / p
    return c_universal * (s**-inverse_p * sigma + s ** (0.5 - inverse_p) * e)


def _difference(
    c_true: CoefficientVector, c_rec: CoefficientVector
) -> CoefficientVector:
    if c_true.dimension != c_rec.dimension:
        raise DimensionMismatchError(
            f"cannot compare {c_true.dimension}-d and {c_rec.dimension}-d coefficients"
        )
    return c_true - c_rec


def _grid(d: int, quad: QuadratureConfig) -> tuple[PointSet, int]:
    fitting = int(math.floor(quad.max_grid_points ** (1 / d)))
    per_dim = max(1, min(quad.grid_per_dim, fitting))
    while per_dim > 1 and per_dim**d > quad.max_grid_points:
        per_dim -= 1
    lattice = np.indices((per_dim,) * d, dtype=np.float64).reshape(d, -1).T / per_dim
    return PointSet(d, lattice), per_dim


def _monte_carlo_power(
    h: CoefficientVector, p: float, quad: QuadratureConfig
) -> LpError:
    points = draw_uniform(quad.n, h.dimension, quad.seed)
    values = np.abs(evaluate(h, points)) ** p
    mean = float(np.mean(values))
    if mean == 0:
        return LpError(p=p, value=0.0)
    mean_error = float(np.std(values, ddof=1)) / math.sqrt(quad.n)
    # delta method for μ^{1/p}
    standard_error = mean ** (1 / p - 1) * mean_error / p
    return LpError(p=p, value=mean ** (1 / p), standard_error=standard_error)


def monte_carlo_l2(
    c_true: CoefficientVector,
    c_rec: CoefficientVector,
    quad: QuadratureConfig | None = None,
) -> LpError:
    """Sampled L2 error, independent of the Parseval path."""
    h = _difference(c_true, c_rec)
    return _monte_carlo_power(h, 2.0, quad or QuadratureConfig())


def lp_error(
    c_true: CoefficientVector,
    c_rec: CoefficientVector,
    p: float,
    quad: QuadratureConfig | None = None,
) -> LpError:
    """
    ‖f − g‖_p for two coefficient vectors.

    p = 2 is exact by Parseval. For 2 < p < inf the value is a Monte Carlo
    estimate with its standard error. For p = inf the value is the maximum
    over a regular grid, and ``upper_bound`` adds Σ|h_k|·min(2, π‖k‖₁/g) for
    the gaps between grid points, capped by the Wiener norm.
    """
    if not p >= 2:
        raise ValueError(f"error norm index must be >= 2, got {p}")
    quad = quad or QuadratureConfig()
    h = _difference(c_true, c_rec)
    if h.support_size == 0:
        return LpError(p=p, value=0.0, upper_bound=0.0 if math.isinf(p) else None)
    if p == 2:
        return LpError(p=p, value=float(np.sqrt(np.sum(h.moduli**2))))
    if not math.isinf(p):
        return _monte_carlo_power(h, p, quad)
    grid, per_dim = _grid(h.dimension, quad)
    peak = float(np.max(np.abs(evaluate(h, grid))))
    spread = np.minimum(2.0, math.pi * np.sum(np.abs(h.indices), axis=1) / per_dim)
    upper = min(peak + float(np.sum(h.moduli * spread)), wiener_norm(h))
    return LpError(p=p, value=peak, upper_bound=max(peak, upper))


def recover(
    f: CoefficientVector,
    plan: RecoveryPlan,
    seed: int,
    cfg: SolverConfig | None = None,
    eta_mode: EtaMode = EtaMode.CLASS,
    quad: QuadratureConfig | None = None,
    entry_cap: int = DEFAULT_MATRIX_ENTRY_CAP,
    solver: BpdnSolver | None = None,
) -> RecoveryReport:
    """
    Sample f at plan.m uniform points and decode by ℓ1 minimization on Λ.

    Args:
        f: Ground truth, a member of plan.spec
        plan: Parameters from plan_parameters or fixed_plan
        seed: Philox key for the sampling points
        cfg: Solver settings, used when no solver is given
        eta_mode: CLASS uses the class-level bound; TAIL uses the
            ground truth's own tail and is labelled in the report
        quad: Quadrature used for p != 2 errors
        solver: Alternative BPDN solver

    Returns:
        RecoveryReport; a non-converged solve is reported through its status

    Raises:
        InvalidProblemError: If f violates an exactly checkable class constraint
        NumericalFailureError: If P_Λ f fails the tail-based feasibility check
    """
    started = time.perf_counter()
    warnings: list[str] = []
    check = membership(plan.spec, f)
    if not check.member:
        if not check.sufficient_only:
            raise InvalidProblemError(
                f"ground truth is not a member of {plan.spec.label}: "
                f"{check.constraints}"
            )
        warnings.append("sufficient Hölder condition fails; membership unverified")
    elif check.sufficient_only:
        warnings.append("membership verified only by a sufficient condition")

    index_set = plan.index_set
    points = draw_uniform(plan.m, plan.spec.dimension, seed)
    samples = evaluate(f, points)
    matrix = measurement_matrix(index_set, points, entry_cap)
    root_m = math.sqrt(plan.m)

    tail = tail_wiener_norm(f, index_set)
    projected = matrix.entries @ coefficients_on(f, index_set)
    projected_residual = float(np.linalg.norm(projected - samples))
    slack = FEASIBILITY_SLACK * max(1.0, float(np.linalg.norm(samples)))
    if projected_residual > tail * root_m + slack:
        raise NumericalFailureError(
            f"projection residual {projected_residual:.6g} exceeds tail bound "
            f"{tail * root_m:.6g}"
        )

    if eta_mode is EtaMode.TAIL:
        eta = tail * root_m
        warnings.append("cheat mode: eta taken from the ground truth's own tail")
    else:
        eta = plan.eta
        if tail > plan.noise_level:
            warnings.append("ground-truth tail exceeds the class noise level")

    solver = solver or PrimalDualSolver(cfg)
    result = solver.solve(BpdnProblem(matrix, samples, eta))
    recovered = CoefficientVector.from_arrays(
        plan.spec.dimension, index_set.indices, result.x
    )
    error = lp_error(f, recovered, plan.p, quad)
    sigma = sigma_s(f, plan.s)
    return RecoveryReport(
        recovered=recovered,
        lp_error=error,
        rhs_bound=error_bound_rhs(
            plan.s, plan.p, sigma, eta / root_m, plan.c_universal
        ),
        samples_used=plan.m,
        wall_time=time.perf_counter() - started,
        seed=seed,
        plan=plan,
        solver=result,
        eta_mode=eta_mode,
        eta_used=eta,
        sigma=sigma,
        tail=tail,
        warnings=tuple(warnings),
    )


def calibrate_sample_factor(
    plan: RecoveryPlan,
    members: Sequence[CoefficientVector],
    seeds: Iterable[int],
    cfg: SolverConfig | None = None,
    max_doublings: int = 8,
    eta_mode: EtaMode = EtaMode.CLASS,
    quad: QuadratureConfig | None = None,
    entry_cap: int = DEFAULT_MATRIX_ENTRY_CAP,
) -> tuple[float, float]:
    """
    Double the sample count until lp_error <= rhs_bound in a 1 − γ fraction of runs.

    Every member is recovered once per seed with the given solver settings,
    noise mode and quadrature.

    Returns:
        (factor applied to plan.m, success rate reached); the last tried
        pair is returned if the target rate is never met
    """
    seed_list = list(seeds)
    if not members or not seed_list:
        raise ValueError("calibration needs at least one member and one seed")
    factor = 1.0
    rate = 0.0
    for _ in range(max_doublings + 1):
        trial_plan = dataclasses.replace(plan, m=max(1, math.ceil(plan.m * factor)))
        outcomes = [
            recover(
                member, trial_plan, seed, cfg, eta_mode, quad, entry_cap
            ).within_bound
            for member in members
            for seed in seed_list
        ]
        rate = sum(outcomes) / len(outcomes)
        if rate >= 1 - plan.gamma:
            return factor, rate
        factor *= 2
    return factor / 2, rate


def planted_sparse(index_set: IndexSet, s: int, seed: int) -> CoefficientVector:
    """
    An s-sparse vector on Λ with unit ℓ2 norm.

    The support is uniform among the members of Λ and the amplitudes have
    uniform phase and Gaussian moduli before normalization.
    """
    if not (1 <= s <= len(index_set)):
        raise ValueError(f"sparsity must lie in [1, {len(index_set)}], got {s}")
    rng = generator(seed)
    positions = rng.choice(len(index_set), size=s, replace=False)
    values = rng.standard_normal(s) + 1j * rng.standard_normal(s)
    values /= np.linalg.norm(values)
    return CoefficientVector.from_arrays(
        index_set.dimension, index_set.indices[positions], values
    )


@dataclasses.dataclass(frozen=True)
class PlantedSparseGenerator:
    """``GroundTruthGenerator`` of s-sparse unit vectors supported in Λ."""

    index_set: IndexSet
    s: int

    def generate(self, seed: int) -> CoefficientVector:
        return planted_sparse(self.index_set, self.s, seed)
