"""
Wiener-algebra coefficient vectors and the function classes built on them.

All logarithms are natural. Every class here lies in the Wiener unit ball, so
the sup-norm of any projection error is bounded by 1.
"""

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import special

from .errors import CardinalityCapError, DimensionMismatchError, UnsupportedClassError
from .models import (
    ClassBoundReport,
    ClassSpec,
    ClassVariant,
    CoefficientVector,
    FloatArray,
    IndexSet,
    IntArray,
    MembershipReport,
    MultiIndex,
)
from .sampling import generator

DEFAULT_RADIUS_CAP = 10**9
MEMBERSHIP_TOL = 1e-12

# homogeneity degree of each constraint under c -> t * c
_CONSTRAINT_DEGREES = {
    "wiener_norm": 1,
    "log_weighted_norm": 1,
    "hoelder_sufficient": 1,
    "sobolev_energy": 2,
}


def wiener_norm(c: CoefficientVector) -> float:
    """‖f‖_A = Σ_k |c_k|."""
    return float(np.sum(c.moduli))


def _check_frequency(spec: ClassSpec, k: MultiIndex | Iterable[int]) -> IntArray:
    row = np.asarray(tuple(int(v) for v in k), dtype=np.int64)
    if row.shape != (spec.dimension,):
        raise DimensionMismatchError(
            f"frequency of length {row.size} for a {spec.dimension}-d class"
        )
    return row.reshape(1, -1)


def log_weights(indices: IntArray) -> FloatArray:
    """max(1, ln ‖k‖_∞) per row; k = 0 gets weight 1."""
    if not indices.size:
        return np.ones(len(indices))
    sup = np.max(np.abs(indices), axis=1).astype(np.float64)
    with np.errstate(divide="ignore"):
        logs = np.log(sup)
    return np.maximum(1.0, logs)


def sobolev_weights(indices: IntArray, smoothness: float) -> FloatArray:
    """∏_i max(1, |k_i|^{2s}) per row."""
    if len(indices) == 0:
        return np.zeros(0)
    factors = np.maximum(1.0, np.abs(indices).astype(np.float64) ** (2 * smoothness))
    return np.prod(factors, axis=1)


def hoelder_weights(indices: IntArray, alpha: float) -> FloatArray:
    """min(2, (2π‖k‖₂)^α · 2^{1-α}) per row."""
    if len(indices) == 0:
        return np.zeros(0)
    norms = np.linalg.norm(indices.astype(np.float64), axis=1)
    return np.minimum(2.0, (2 * math.pi * norms) ** alpha * 2 ** (1 - alpha))


def class_weights(spec: ClassSpec, indices: IntArray) -> FloatArray:
    """Vectorized ``class_weight``."""
    if spec.variant is ClassVariant.LOG_CLASS:
        return log_weights(indices)
    if spec.variant is ClassVariant.MIXED_SOBOLEV:
        assert spec.smoothness is not None
        return sobolev_weights(indices, spec.smoothness)
    return np.ones(len(indices))


def class_weight(spec: ClassSpec, k: MultiIndex | Iterable[int]) -> float:
    """
    The per-frequency weight of a class constraint.

    LogClass uses max(1, ln‖k‖_∞), mixed Sobolev the ℓ2 weight
    ∏ max(1, |k_i|^{2s}); the Wiener ball and the Hölder class use 1 (the
    Hölder condition is checked through ``hoelder_weight``).

    Examples:
        >>> class_weight(ClassSpec.mixed_sobolev(2, 1.0), (2, 3))
        36.0
    """
    return float(class_weights(spec, _check_frequency(spec, k))[0])


def hoelder_weight(k: MultiIndex | Iterable[int], alpha: float) -> float:
    """Per-frequency factor of the sufficient Hölder condition."""
    if not (0 < alpha <= 1):
        raise ValueError(f"Hölder exponent must lie in (0, 1], got {alpha}")
    row = np.asarray(tuple(int(v) for v in k), dtype=np.int64).reshape(1, -1)
    return float(hoelder_weights(row, alpha)[0])


def _constraint_values(spec: ClassSpec, c: CoefficientVector) -> dict[str, float]:
    moduli = c.moduli
    if spec.variant is ClassVariant.LOG_CLASS:
        return {"log_weighted_norm": float(np.sum(moduli * log_weights(c.indices)))}
    values = {"wiener_norm": float(np.sum(moduli))}
    if spec.variant is ClassVariant.MIXED_SOBOLEV:
        assert spec.smoothness is not None
        values["sobolev_energy"] = float(
            np.sum(moduli**2 * sobolev_weights(c.indices, spec.smoothness))
        )
    elif spec.variant is ClassVariant.HOELDER:
        assert spec.alpha is not None
        values["hoelder_sufficient"] = float(
            np.sum(moduli * hoelder_weights(c.indices, spec.alpha))
        )
    return values


def membership(
    spec: ClassSpec, c: CoefficientVector, tol: float = MEMBERSHIP_TOL
) -> MembershipReport:
    """
    Check class membership and report every constraint value.

    A constraint holds when its value is at most 1 + tol. For the Hölder class
    the verdict rests on a sufficient condition and is flagged as such.
    """
    if c.dimension != spec.dimension:
        raise DimensionMismatchError(
            f"{c.dimension}-d coefficients for a {spec.dimension}-d class"
        )
    values = _constraint_values(spec, c)
    member = all(value <= 1.0 + tol for value in values.values())
    return MembershipReport(
        member=member,
        constraints=values,
        sufficient_only=spec.variant is ClassVariant.HOELDER,
    )


def _random_support(
    rng: np.random.Generator, d: int, max_freq: int, size: int
) -> IntArray:
    side = 2 * max_freq + 1
    total = side**d
    if size > total:
        raise ValueError(
            f"support budget {size} exceeds the {total} frequencies in "
            f"[-{max_freq},{max_freq}]^{d}"
        )
    if total <= 1_000_000:
        flat = rng.choice(total, size=size, replace=False)
        digits = np.empty((size, d), dtype=np.int64)
        for axis in range(d - 1, -1, -1):
            digits[:, axis] = flat % side
            flat = flat // side
        return digits - max_freq
    chosen: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()
    while len(chosen) < size:
        batch = rng.integers(-max_freq, max_freq + 1, size=(2 * size, d))
        for row in batch:
            key = tuple(int(v) for v in row)
            if key not in seen:
                seen.add(key)
                chosen.append(key)
                if len(chosen) == size:
                    break
    return np.asarray(chosen, dtype=np.int64)


def random_member(
    spec: ClassSpec, support_budget: int, max_freq: int, seed: int
) -> CoefficientVector:
    """
    Draw an extremal member of a class.

    The support is uniform among frequencies of [-max_freq, max_freq]^d, the
    amplitudes have uniform phase and uniform modulus in (0, 1], and the result
    is rescaled so that the binding class constraint equals 1.

    Args:
        spec: Target class
        support_budget: Number of nonzero coefficients, at least 1
        max_freq: Largest |k_i| allowed in the support
        seed: Philox seed; equal seeds give identical vectors

    Returns:
        CoefficientVector with membership(spec, result).member True
    """
    if support_budget < 1:
        raise ValueError(f"support budget must be >= 1, got {support_budget}")
    if max_freq < 0:
        raise ValueError(f"max_freq must be >= 0, got {max_freq}")
    rng = generator(seed)
    d = spec.dimension
    support = _random_support(rng, d, max_freq, support_budget)
    moduli = 1.0 - rng.random(support_budget)
    phases = 2 * math.pi * rng.random(support_budget)
    draft = CoefficientVector.from_arrays(d, support, moduli * np.exp(1j * phases))

    scale = min(
        value ** (-1.0 / _CONSTRAINT_DEGREES[name])
        for name, value in _constraint_values(spec, draft).items()
        if value > 0
    )
    return CoefficientVector(d, draft.indices, draft.amplitudes * scale)


def _positions(c: CoefficientVector, index_set: IndexSet) -> IntArray:
    if c.dimension != index_set.dimension:
        raise DimensionMismatchError(
            f"{c.dimension}-d coefficients against a {index_set.dimension}-d index set"
        )
    return index_set.positions(c.indices)


def project(c: CoefficientVector, index_set: IndexSet) -> CoefficientVector:
    """P_Λ: keep exactly the coefficients whose frequency lies in Λ."""
    inside = _positions(c, index_set) >= 0
    return CoefficientVector(c.dimension, c.indices[inside], c.amplitudes[inside])


def coefficients_on(c: CoefficientVector, index_set: IndexSet) -> np.ndarray:
    """Dense coefficient vector of P_Λ c in the column order of Λ."""
    positions = _positions(c, index_set)
    dense = np.zeros(len(index_set), dtype=np.complex128)
    inside = positions >= 0
    dense[positions[inside]] = c.amplitudes[inside]
    return dense


def tail_wiener_norm(c: CoefficientVector, index_set: IndexSet) -> float:
    """Σ_{k∉Λ} |c_k|, an upper bound on ‖f − P_Λ f‖_∞."""
    outside = _positions(c, index_set) < 0
    return float(np.sum(c.moduli[outside]))


def sigma_s(c: CoefficientVector, s: int) -> float:
    """
    Best s-term error in the Wiener norm.

    The s largest moduli are removed (ties broken by index order) and the rest
    summed, so sigma_s(c, 0) is the Wiener norm.
    """
    if s < 0:
        raise ValueError(f"s must be >= 0, got {s}")
    moduli = c.moduli
    order = np.argsort(-moduli, kind="stable")
    return float(np.sum(moduli[order[s:]]))


def zeta(x: float) -> float:
    """Riemann zeta for x > 1."""
    if not x > 1:
        raise ValueError(f"zeta needs x > 1, got {x}")
    return float(special.zeta(x))


def sobolev_constant(smoothness: float) -> float:
    """c_s = Σ_{k∈Z} max(1, |k|)^{-2s} = 1 + 2ζ(2s)."""
    if not smoothness > 0.5:
        raise ValueError(f"smoothness must be > 1/2, got {smoothness}")
    return 1.0 + 2.0 * zeta(2 * smoothness)


def _log_sobolev_prefactor(spec: ClassSpec) -> float:
    # log sqrt(d * c_s^d)
    assert spec.smoothness is not None
    return 0.5 * (
        math.log(spec.dimension)
        + spec.dimension * math.log(sobolev_constant(spec.smoothness))
    )


def _hoelder_formula(spec: ClassSpec, m: int) -> float:
    assert spec.alpha is not None
    base = spec.hoelder_constants.c3 * math.log(m)
    exponent = spec.dimension * math.log(base) - spec.alpha * math.log(m)
    return 1.0 if exponent >= 0 else math.exp(exponent)


def projection_error_bound(spec: ClassSpec, m: int) -> float:
    """
    Class-level upper bound on E^∞ for the cube [-m, m]^d.

    LogClass: 1/ln(m+1). Mixed Sobolev: sqrt(d c_s^d) m^{-(s-1/2)}.
    Hölder: min(1, (c3 ln m)^d m^{-α}) for m >= 2 and 1 for m = 1.
    Wiener ball: 1.

    Raises:
        UnsupportedClassError: If m < 1
    """
    if m < 1:
        raise UnsupportedClassError(f"projection bounds need m >= 1, got {m}")
    if spec.variant is ClassVariant.LOG_CLASS:
        return 1.0 / math.log(m + 1)
    if spec.variant is ClassVariant.MIXED_SOBOLEV:
        assert spec.smoothness is not None
        exponent = _log_sobolev_prefactor(spec) - (spec.smoothness - 0.5) * math.log(m)
        return math.exp(exponent) if exponent < 700 else math.inf
    if spec.variant is ClassVariant.HOELDER:
        return 1.0 if m < 2 else _hoelder_formula(spec, m)
    return 1.0


def reference_log_cardinality(spec: ClassSpec, epsilon: float) -> float | None:
    """Closed-form bound on log N^∞(ε) for the class, if one is stated."""
    if spec.variant is ClassVariant.LOG_CLASS:
        return 2 * spec.dimension / epsilon
    if spec.variant is ClassVariant.MIXED_SOBOLEV:
        assert spec.smoothness is not None
        d = spec.dimension
        return (d / (2 * spec.smoothness - 1)) * (
            math.log(d)
            + d * math.log(sobolev_constant(spec.smoothness))
            - 2 * math.log(epsilon)
        )
    return None


def _smallest_radius(spec: ClassSpec, epsilon: float, guess: int, cap: int) -> int:
    m = max(1, min(guess, cap))
    while m > 1 and projection_error_bound(spec, m - 1) <= epsilon:
        m -= 1
    while projection_error_bound(spec, m) > epsilon:
        m += 1
        if m > cap:
            raise CardinalityCapError("truncation radius", m, cap)
    return m


def _hoelder_radius(spec: ClassSpec, epsilon: float, cap: int) -> int:
    if projection_error_bound(spec, 1) <= epsilon:
        return 1
    if cap >= 2 and projection_error_bound(spec, 2) <= epsilon:
        return 2
    assert spec.alpha is not None
    # the formula increases up to ln m = d/α and decreases afterwards
    peak = math.exp(min(spec.dimension / spec.alpha, 700.0))
    low = max(2, int(peak))
    if low > cap or projection_error_bound(spec, cap) > epsilon:
        raise CardinalityCapError("truncation radius", max(low, cap + 1), cap)
    high = cap
    while low < high:
        mid = (low + high) // 2
        if projection_error_bound(spec, mid) <= epsilon:
            high = mid
        else:
            low = mid + 1
    return low


def plan_truncation(
    spec: ClassSpec, epsilon: float, radius_cap: int = DEFAULT_RADIUS_CAP
) -> ClassBoundReport:
    """
    Smallest cube radius whose projection-error bound is at most ε.

    Args:
        spec: Function class
        epsilon: Target error in (0, 1]
        radius_cap: Largest admissible radius m

    Returns:
        ClassBoundReport with m, the bound at m, d·ln(2m+1) and the class's
        closed-form log N reference when one exists

    Raises:
        UnsupportedClassError: For the Wiener ball, whose bound never decays
        CardinalityCapError: If the radius would exceed radius_cap
    """
    if not (0 < epsilon <= 1):
        raise ValueError(f"target error must lie in (0, 1], got {epsilon}")
    if spec.variant is ClassVariant.WIENER_BALL:
        raise UnsupportedClassError(
            "the Wiener ball has no decaying projection bound; "
            "no finite truncation achieves the target"
        )
    if spec.variant is ClassVariant.LOG_CLASS:
        if 1 / epsilon > math.log(radius_cap + 1):
            requested = math.exp(1 / epsilon) - 1 if 1 / epsilon < 700 else math.inf
            raise CardinalityCapError("truncation radius", requested, radius_cap)
        start = math.ceil(math.exp(1 / epsilon) - 1)
        m = _smallest_radius(spec, epsilon, start, radius_cap)
    elif spec.variant is ClassVariant.MIXED_SOBOLEV:
        assert spec.smoothness is not None
        log_m = (_log_sobolev_prefactor(spec) - math.log(epsilon)) / (
            spec.smoothness - 0.5
        )
        if log_m > math.log(radius_cap):
            raise CardinalityCapError(
                "truncation radius", math.exp(min(log_m, 700.0)), radius_cap
            )
        m = _smallest_radius(spec, epsilon, math.ceil(math.exp(log_m)), radius_cap)
    else:
        m = _hoelder_radius(spec, epsilon, radius_cap)
    return ClassBoundReport(
        m=m,
        projection_error_bound=projection_error_bound(spec, m),
        log_cardinality=spec.dimension * math.log(2 * m + 1),
        reference_log_cardinality=reference_log_cardinality(spec, epsilon),
    )


def complexity_shape(spec: ClassSpec, epsilon: float, p: float = 2.0) -> float:
    """
    Closed-form sample-complexity shape of the class, without its constant.

    LogClass: d ε^{-3p/2} ln³(ε^{-p}); mixed Sobolev: d² ln d ε^{-p} ln⁴(1/ε);
    Hölder: d² ln²d ε^{-p} ln⁴(1/ε). ln d is clamped at ln 2. The Wiener ball
    has no polynomial shape and yields inf.
    """
    d = spec.dimension
    log_d = math.log(max(d, 2))
    inv = 1 / epsilon
    if spec.variant is ClassVariant.LOG_CLASS:
        return d * inv ** (1.5 * p) * math.log(inv**p) ** 3
    if spec.variant is ClassVariant.MIXED_SOBOLEV:
        return d**2 * log_d * inv**p * math.log(inv) ** 4
    if spec.variant is ClassVariant.HOELDER:
        return d**2 * log_d**2 * inv**p * math.log(inv) ** 4
    return math.inf


def theorem_shape(d: int, epsilon: float) -> float:
    """d ε^{-3} ln³(1/ε), the L2 sample-complexity shape for the log class."""
    return d * epsilon**-3 * math.log(1 / epsilon) ** 3


def lebesgue_constant(m: int, quadrature_points: int) -> float:
    """
    ∫_0^1 |D_m(t)| dt for the Dirichlet kernel D_m(t) = sin((2m+1)πt)/sin(πt).

    Composite midpoint rule; the midpoints never hit the removable
    singularity at t = 0.

    Raises:
        ValueError: If m < 1 or quadrature_points < 64 m
    """
    if m < 1:
        raise ValueError(f"order must be >= 1, got {m}")
    if quadrature_points < 64 * m:
        raise ValueError(
            f"{quadrature_points} quadrature points are too few for order {m}; "
            f"need at least {64 * m}"
        )
    t = (np.arange(quadrature_points, dtype=np.float64) + 0.5) / quadrature_points
    kernel = np.sin((2 * m + 1) * math.pi * t) / np.sin(math.pi * t)
    return float(np.mean(np.abs(kernel)))


def calibrate_lebesgue_factor(
    orders: Iterable[int], points_per_order: int = 256
) -> float:
    """Empirical c1: the largest lebesgue_constant(m) / ln(m) over m >= 2."""
    ratios = [
        lebesgue_constant(m, points_per_order * m) / math.log(m)
        for m in orders
        if m >= 2
    ]
    if not ratios:
        raise ValueError("calibration needs at least one order m >= 2")
    return max(ratios)


@dataclass(frozen=True)
class ClassMemberGenerator:
    """``GroundTruthGenerator`` of extremal class members."""

    spec: ClassSpec
    support_budget: int
    max_freq: int

    def generate(self, seed: int) -> CoefficientVector:
        return random_member(self.spec, self.support_budget, self.max_freq, seed)
