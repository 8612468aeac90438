"""Domain models for sparse Fourier recovery on Wiener-algebra classes."""

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Iterable, Mapping

import numpy as np
import numpy.typing as npt

from .errors import DimensionMismatchError, InvalidProblemError

MultiIndex = tuple[int, ...]
"""A frequency k in Z^d. Python tuples already order lexicographically."""

IntArray = npt.NDArray[np.int64]
FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


def _lexicographic_order(rows: IntArray) -> IntArray:
    # np.lexsort treats the last key as primary
    return np.lexsort(rows.T[::-1]) if rows.size else np.arange(len(rows))


def _sorted_unique_rows(rows: IntArray) -> tuple[IntArray, IntArray]:
    """Return lexicographically sorted unique rows and the inverse mapping."""
    if len(rows) == 0:
        return rows, np.zeros(0, dtype=np.int64)
    unique, inverse = np.unique(rows, axis=0, return_inverse=True)
    return unique.astype(np.int64), np.asarray(inverse).reshape(-1)


def _as_index_rows(rows: Any, dimension: int) -> IntArray:
    array = np.asarray(rows, dtype=np.int64)
    if array.size == 0:
        return np.zeros((0, dimension), dtype=np.int64)
    if array.ndim == 1:
        array = array.reshape(1, -1)
    if array.ndim != 2 or array.shape[1] != dimension:
        raise DimensionMismatchError(
            f"expected frequencies of length {dimension}, got shape {array.shape}"
        )
    return array


@dataclass(frozen=True, eq=False)
class IndexSet:
    """
    A finite, duplicate-free, lexicographically sorted set of frequencies.

    Build instances with ``multiindex.cube_index_set`` or
    ``multiindex.index_set_from``; the constructor only validates.
    """

    dimension: int
    indices: IntArray

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        rows = _as_index_rows(self.indices, self.dimension)
        if len(rows) > 1:
            if not np.array_equal(_lexicographic_order(rows), np.arange(len(rows))):
                raise ValueError("index set rows must be lexicographically sorted")
            if np.any(np.all(rows[1:] == rows[:-1], axis=1)):
                raise ValueError("index set rows must be unique")
        object.__setattr__(self, "indices", _readonly(rows))

    def __len__(self) -> int:
        return int(self.indices.shape[0])

    def __iter__(self):
        for row in self.indices:
            yield tuple(int(v) for v in row)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IndexSet):
            return NotImplemented
        return self.dimension == other.dimension and np.array_equal(
            self.indices, other.indices
        )

    def __hash__(self) -> int:
        return hash((self.dimension, self.indices.tobytes()))

    @property
    def cardinality(self) -> int:
        """Number of frequencies, #Λ."""
        return len(self)

    @cached_property
    def _encoding(self) -> tuple[IntArray, IntArray, IntArray, IntArray] | None:
        """
        Mixed-radix keys that preserve lexicographic order.

        Returns (lower corner, extents, strides, sorted keys), or None when the
        bounding box is too large to encode in int64.
        """
        if len(self) == 0:
            return None
        lower = self.indices.min(axis=0)
        extents = self.indices.max(axis=0) - lower + 1
        if math.prod(int(e) for e in extents) >= 2**62:
            return None
        strides = np.ones(self.dimension, dtype=np.int64)
        for axis in range(self.dimension - 2, -1, -1):
            strides[axis] = strides[axis + 1] * extents[axis + 1]
        keys = (self.indices - lower) @ strides
        return lower, extents, strides, keys

    def positions(self, rows: Any) -> IntArray:
        """
        Vectorized lookup of column positions.

        Args:
            rows: Array-like of shape (n, d)

        Returns:
            Integer array of length n holding positions, -1 where absent
        """
        rows = _as_index_rows(rows, self.dimension)
        result = np.full(len(rows), -1, dtype=np.int64)
        if len(rows) == 0 or len(self) == 0:
            return result
        encoding = self._encoding
        if encoding is None:
            for i, row in enumerate(rows):
                result[i] = self._bisect(tuple(int(v) for v in row))
            return result
        lower, extents, strides, keys = encoding
        offset = rows - lower
        inside = np.all((offset >= 0) & (offset < extents), axis=1)
        candidate = offset[inside] @ strides
        found = np.searchsorted(keys, candidate)
        found_clipped = np.minimum(found, len(keys) - 1)
        hit = keys[found_clipped] == candidate
        positions = np.where(hit, found_clipped, -1)
        result[np.flatnonzero(inside)] = positions
        return result

    def _bisect(self, key: MultiIndex) -> int:
        low, high = 0, len(self)
        while low < high:
            mid = (low + high) // 2
            if tuple(int(v) for v in self.indices[mid]) < key:
                low = mid + 1
            else:
                high = mid
        if low < len(self) and tuple(int(v) for v in self.indices[low]) == key:
            return low
        return -1

    def to_json(self) -> list[list[int]]:
        """Serialize as a JSON array of integer arrays."""
        return [[int(v) for v in row] for row in self.indices]


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """
    Finitely supported Fourier coefficients f̂(k) of a trigonometric polynomial.

    Indices are stored lexicographically sorted and zero amplitudes are dropped.
    Use ``from_terms`` / ``from_arrays`` to build one from unsorted data.
    """

    dimension: int
    indices: IntArray
    amplitudes: ComplexArray

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        rows = _as_index_rows(self.indices, self.dimension)
        values = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if len(rows) != len(values):
            raise ValueError(
                f"{len(rows)} frequencies but {len(values)} amplitudes given"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidProblemError("coefficient amplitudes must be finite")
        if np.any(values == 0):
            raise ValueError("zero amplitudes must not be stored")
        if len(rows) > 1:
            if not np.array_equal(_lexicographic_order(rows), np.arange(len(rows))):
                raise ValueError("coefficient frequencies must be sorted")
            if np.any(np.all(rows[1:] == rows[:-1], axis=1)):
                raise ValueError("coefficient frequencies must be unique")
        object.__setattr__(self, "indices", _readonly(rows))
        object.__setattr__(self, "amplitudes", _readonly(values))

    @classmethod
    def from_arrays(
        cls, dimension: int, indices: Any, amplitudes: Any
    ) -> "CoefficientVector":
        """
        Build a vector from possibly unsorted, repeated frequencies.

        Repeated frequencies are summed and resulting zeros dropped.
        """
        rows = _as_index_rows(indices, dimension)
        values = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        if len(rows) != len(values):
            raise ValueError(
                f"{len(rows)} frequencies but {len(values)} amplitudes given"
            )
        unique, inverse = _sorted_unique_rows(rows)
        summed = np.zeros(len(unique), dtype=np.complex128)
        np.add.at(summed, inverse, values)
        keep = summed != 0
        return cls(dimension, unique[keep], summed[keep])

    @classmethod
    def from_terms(
        cls,
        dimension: int,
        terms: Mapping[MultiIndex, complex] | Iterable[tuple[Any, complex]],
    ) -> "CoefficientVector":
        """Build a vector from a mapping or iterable of (k, amplitude) pairs."""
        items = list(terms.items()) if isinstance(terms, Mapping) else list(terms)
        if not items:
            return cls.zero(dimension)
        rows = [list(k) if not np.isscalar(k) else [k] for k, _ in items]
        return cls.from_arrays(dimension, rows, [a for _, a in items])

    @classmethod
    def zero(cls, dimension: int) -> "CoefficientVector":
        """The zero function in dimension d."""
        return cls(
            dimension,
            np.zeros((0, dimension), dtype=np.int64),
            np.zeros(0, dtype=np.complex128),
        )

    def __len__(self) -> int:
        return int(self.indices.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoefficientVector):
            return NotImplemented
        return (
            self.dimension == other.dimension
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.amplitudes, other.amplitudes)
        )

    def __hash__(self) -> int:
        return hash(
            (self.dimension, self.indices.tobytes(), self.amplitudes.tobytes())
        )

    def _check_dimension(self, other: "CoefficientVector") -> None:
        if self.dimension != other.dimension:
            raise DimensionMismatchError(
                f"dimension {self.dimension} does not match {other.dimension}"
            )

    def __add__(self, other: "CoefficientVector") -> "CoefficientVector":
        self._check_dimension(other)
        return CoefficientVector.from_arrays(
            self.dimension,
            np.concatenate([self.indices, other.indices]),
            np.concatenate([self.amplitudes, other.amplitudes]),
        )

    def __sub__(self, other: "CoefficientVector") -> "CoefficientVector":
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> "CoefficientVector":
        return CoefficientVector.from_arrays(
            self.dimension, self.indices, self.amplitudes * complex(scalar)
        )

    __rmul__ = __mul__

    @property
    def support_size(self) -> int:
        """Number of stored (nonzero) terms."""
        return len(self)

    @property
    def moduli(self) -> FloatArray:
        """|c_k| in index order."""
        return np.abs(self.amplitudes)

    def as_dict(self) -> dict[MultiIndex, complex]:
        """Return the coefficients as a {k: c_k} mapping."""
        return {
            tuple(int(v) for v in row): complex(a)
            for row, a in zip(self.indices, self.amplitudes)
        }

    def to_json(self) -> dict[str, Any]:
        """Serialize as {"d": int, "terms": [{"k": [...], "re": x, "im": y}]}."""
        return {
            "d": self.dimension,
            "terms": [
                {
                    "k": [int(v) for v in row],
                    "re": float(a.real),
                    "im": float(a.imag),
                }
                for row, a in zip(self.indices, self.amplitudes)
            ],
        }

    @classmethod
    def from_json(cls, payload: Mapping[str, Any]) -> "CoefficientVector":
        """Inverse of ``to_json``; bit-exact for finite doubles."""
        dimension = int(payload["d"])
        terms = payload.get("terms", [])
        if not terms:
            return cls.zero(dimension)
        return cls.from_arrays(
            dimension,
            [term["k"] for term in terms],
            [complex(float(term["re"]), float(term["im"])) for term in terms],
        )


class ClassVariant(str, Enum):
    """The function classes supported by the bound calculators."""

    WIENER_BALL = "wiener"
    LOG_CLASS = "log"
    MIXED_SOBOLEV = "mixed_sobolev"
    HOELDER = "hoelder"


@dataclass(frozen=True)
class HoelderConstants:
    """
    Constants of the Hölder projection-error bound.

    c1 is the Lebesgue-constant factor, c2 the Jackson constant; the bound
    uses c3 = max(c1, c2) * e.
    """

    c1: float = 1.5
    c2: float = 3.0

    def __post_init__(self) -> None:
        if not (self.c1 > 0 and self.c2 > 0):
            raise ValueError("Hölder constants c1 and c2 must be positive")

    @property
    def c3(self) -> float:
        return max(self.c1, self.c2) * math.e


@dataclass(frozen=True)
class ClassSpec:
    """One of the Wiener-algebra function classes in dimension d."""

    variant: ClassVariant
    dimension: int
    smoothness: float | None = None
    alpha: float | None = None
    hoelder_constants: HoelderConstants = field(default_factory=HoelderConstants)

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", ClassVariant(self.variant))
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        if self.variant is ClassVariant.MIXED_SOBOLEV:
            if self.smoothness is None or not self.smoothness > 0.5:
                raise ValueError(
                    f"mixed Sobolev smoothness must be > 1/2, got {self.smoothness}"
                )
        if self.variant is ClassVariant.HOELDER:
            if self.alpha is None or not (0 < self.alpha <= 1):
                raise ValueError(
                    f"Hölder exponent must lie in (0, 1], got {self.alpha}"
                )

    @classmethod
    def wiener_ball(cls, dimension: int) -> "ClassSpec":
        return cls(ClassVariant.WIENER_BALL, dimension)

    @classmethod
    def log_class(cls, dimension: int) -> "ClassSpec":
        return cls(ClassVariant.LOG_CLASS, dimension)

    @classmethod
    def mixed_sobolev(cls, dimension: int, smoothness: float) -> "ClassSpec":
        return cls(ClassVariant.MIXED_SOBOLEV, dimension, smoothness=smoothness)

    @classmethod
    def hoelder(
        cls,
        dimension: int,
        alpha: float,
        constants: HoelderConstants | None = None,
    ) -> "ClassSpec":
        return cls(
            ClassVariant.HOELDER,
            dimension,
            alpha=alpha,
            hoelder_constants=constants or HoelderConstants(),
        )

    @property
    def label(self) -> str:
        """Short human-readable label used in CSV rows."""
        if self.variant is ClassVariant.MIXED_SOBOLEV:
            return f"mixed_sobolev(s={self.smoothness:g})"
        if self.variant is ClassVariant.HOELDER:
            return f"hoelder(alpha={self.alpha:g})"
        return self.variant.value

    def to_json(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"variant": self.variant.value, "d": self.dimension}
        if self.smoothness is not None:
            payload["smoothness"] = self.smoothness
        if self.alpha is not None:
            payload["alpha"] = self.alpha
            payload["c1"] = self.hoelder_constants.c1
            payload["c2"] = self.hoelder_constants.c2
        return payload


@dataclass(frozen=True)
class MembershipReport:
    """Outcome of a class-membership check with each constraint's value."""

    member: bool
    constraints: dict[str, float]
    sufficient_only: bool = False

    @property
    def slack(self) -> float:
        """1 minus the largest constraint value; negative for nonmembers."""
        if not self.constraints:
            return 1.0
        return 1.0 - max(self.constraints.values())


@dataclass(frozen=True)
class ClassBoundReport:
    """Truncation radius chosen for a target projection error."""

    m: int
    projection_error_bound: float
    log_cardinality: float
    reference_log_cardinality: float | None = None

    @property
    def within_reference(self) -> bool | None:
        """Whether log #Λ respects the closed-form N bound, when one is known."""
        if self.reference_log_cardinality is None:
            return None
        return self.log_cardinality <= self.reference_log_cardinality + 1e-12


@dataclass(frozen=True, eq=False)
class PointSet:
    """Sampling points in [0, 1)^d, regenerable from (n, d, seed)."""

    dimension: int
    points: FloatArray
    seed: int | None = None

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != self.dimension:
            raise DimensionMismatchError(
                f"expected points of shape (n, {self.dimension}), got {points.shape}"
            )
        if points.shape[0] < 1:
            raise ValueError("a point set needs at least one point")
        if np.any(points < 0) or np.any(points >= 1):
            raise ValueError("point coordinates must lie in [0, 1)")
        object.__setattr__(self, "points", _readonly(points))

    def __len__(self) -> int:
        return int(self.points.shape[0])

    def to_json(self) -> dict[str, Any]:
        """Serialize as {"d", "seed", "n"}; points are regenerated on load."""
        if self.seed is None:
            raise ValueError("only seeded point sets can be serialized")
        return {"d": self.dimension, "seed": self.seed, "n": len(self)}


@dataclass(frozen=True, eq=False)
class MeasurementMatrix:
    """G[j][l] = b_{k_l}(x_j), rows indexed by points, columns by frequencies."""

    entries: ComplexArray

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=np.complex128)
        if entries.ndim != 2:
            raise InvalidProblemError(
                f"measurement matrix must be 2-D, got shape {entries.shape}"
            )
        object.__setattr__(self, "entries", _readonly(entries))

    @property
    def rows(self) -> int:
        return int(self.entries.shape[0])

    @property
    def cols(self) -> int:
        return int(self.entries.shape[1])


@dataclass(frozen=True, eq=False)
class BpdnProblem:
    """min ||x||_1 subject to ||G x - y||_2 <= eta."""

    matrix: MeasurementMatrix
    samples: ComplexArray
    eta: float

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.complex128).reshape(-1)
        if len(samples) != self.matrix.rows:
            raise InvalidProblemError(
                f"{len(samples)} samples for a matrix with {self.matrix.rows} rows"
            )
        if not np.all(np.isfinite(self.matrix.entries)):
            raise InvalidProblemError("measurement matrix contains NaN or Inf")
        if not np.all(np.isfinite(samples)):
            raise InvalidProblemError("samples contain NaN or Inf")
        if not (math.isfinite(self.eta) and self.eta >= 0):
            raise InvalidProblemError(f"eta must be finite and >= 0, got {self.eta}")
        object.__setattr__(self, "samples", _readonly(samples))
        object.__setattr__(self, "eta", float(self.eta))


class SolverStatus(str, Enum):
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    INFEASIBLE_DETECTED = "infeasible_detected"


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and step parameters of the primal-dual BPDN solver."""

    gap_tol: float = 1e-8
    feas_tol: float = 1e-9
    max_iter: int = 50_000
    power_iterations: int = 30
    step_safety: float = 0.99
    relaxation: float = 1.0
    check_every: int = 25
    support_tol: float = 1e-9

    def __post_init__(self) -> None:
        if not (self.gap_tol > 0 and self.feas_tol > 0):
            raise ValueError("solver tolerances must be positive")
        if self.max_iter < 1 or self.power_iterations < 1 or self.check_every < 1:
            raise ValueError("iteration counts must be positive")
        if not (0 < self.step_safety < 1):
            raise ValueError("step_safety must lie in (0, 1)")
        if not (0 <= self.relaxation <= 1):
            raise ValueError("relaxation must lie in [0, 1]")
        if not (0 < self.support_tol < 1):
            raise ValueError("support_tol must lie in (0, 1)")


def _complex_to_json(values: ComplexArray) -> dict[str, list[float]]:
    return {
        "re": [float(v) for v in np.real(values)],
        "im": [float(v) for v in np.imag(values)],
    }


@dataclass(frozen=True, eq=False)
class SolverResult:
    """
    A certified (or best-effort) solution of a BPDN problem.

    ``dual`` is the dual vector whose bound produced ``certificate_gap``;
    None when the bound came from ν = 0.
    """

    x: ComplexArray
    objective: float
    residual_norm: float
    iterations: int
    certificate_gap: float
    status: SolverStatus
    dual: ComplexArray | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", _readonly(np.asarray(self.x, np.complex128)))

    @property
    def converged(self) -> bool:
        return self.status is SolverStatus.CONVERGED

    def to_json(self) -> dict[str, Any]:
        return {
            "x": _complex_to_json(self.x),
            "objective": self.objective,
            "residual_norm": self.residual_norm,
            "iterations": self.iterations,
            "certificate_gap": self.certificate_gap,
            "status": self.status.value,
        }


class EtaMode(str, Enum):
    """Source of the noise radius handed to the BPDN solver."""

    CLASS = "class"
    TAIL = "tail"


@dataclass(frozen=True, eq=False)
class RecoveryPlan:
    """The tuple (Λ, s, m, η) used by one run of the recovery algorithm."""

    spec: ClassSpec
    index_set: IndexSet
    truncation_radius: int
    s: int
    m: int
    noise_level: float
    gamma: float
    c_universal: float
    p: float
    epsilon: float | None = None
    epsilon_tilde: float | None = None

    def __post_init__(self) -> None:
        if self.s < 2:
            raise ValueError(f"sparsity s must be >= 2, got {self.s}")
        if self.m < 1:
            raise ValueError(f"sample count m must be >= 1, got {self.m}")
        if not (0 < self.gamma < 1):
            raise ValueError(
                f"failure probability must lie in (0, 1), got {self.gamma}"
            )
        if len(self.index_set) < 1:
            raise ValueError("a recovery plan needs a nonempty index set")
        if self.index_set.dimension != self.spec.dimension:
            raise DimensionMismatchError("index set and class dimension differ")

    @property
    def eta(self) -> float:
        """Noise radius E * sqrt(m) of the l1 program."""
        return self.noise_level * math.sqrt(self.m)

    def to_json(self) -> dict[str, Any]:
        return {
            "spec": self.spec.to_json(),
            "truncation_radius": self.truncation_radius,
            "cardinality": len(self.index_set),
            "s": self.s,
            "m": self.m,
            "noise_level": self.noise_level,
            "eta": self.eta,
            "gamma": self.gamma,
            "c_universal": self.c_universal,
            "p": _norm_index_to_json(self.p),
            "epsilon": self.epsilon,
            "epsilon_tilde": self.epsilon_tilde,
        }


def _norm_index_to_json(p: float) -> float | str:
    return "inf" if math.isinf(p) else p


@dataclass(frozen=True)
class QuadratureConfig:
    """Point budgets for L_p error estimation."""

    n: int = 4096
    grid_per_dim: int = 64
    seed: int = 0
    max_grid_points: int = 1_000_000

    def __post_init__(self) -> None:
        if self.n < 2 or self.grid_per_dim < 1 or self.max_grid_points < 1:
            raise ValueError("quadrature budgets must be positive (n >= 2)")


@dataclass(frozen=True)
class LpError:
    """An L_p error value with its standard error and optional upper bound."""

    p: float
    value: float
    standard_error: float = 0.0
    upper_bound: float | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "p": _norm_index_to_json(self.p),
            "value": self.value,
            "standard_error": self.standard_error,
            "upper_bound": self.upper_bound,
        }


@dataclass(frozen=True, eq=False)
class RecoveryReport:
    """Outcome of one recovery run against a known ground truth."""

    recovered: CoefficientVector
    lp_error: LpError
    rhs_bound: float
    samples_used: int
    wall_time: float
    seed: int
    plan: RecoveryPlan
    solver: SolverResult
    eta_mode: EtaMode
    eta_used: float
    sigma: float
    tail: float
    warnings: tuple[str, ...] = ()

    @property
    def within_bound(self) -> bool:
        return self.lp_error.value <= self.rhs_bound

    def to_json(self) -> dict[str, Any]:
        return {
            "plan": self.plan.to_json(),
            "seed": self.seed,
            "samples_used": self.samples_used,
            "eta_mode": self.eta_mode.value,
            "eta_used": self.eta_used,
            "sigma": self.sigma,
            "tail": self.tail,
            "lp_error": self.lp_error.to_json(),
            "rhs_bound": self.rhs_bound,
            "solver": self.solver.to_json(),
            "recovered": self.recovered.to_json(),
            "wall_time": self.wall_time,
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True, eq=False)
class LinearAlgorithmMatrix:
    """A linear map T on C^Λ together with the rank it claims to have."""

    matrix: ComplexArray
    declared_rank: int
    rank_tol: float = 1e-10

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=np.complex128)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InvalidProblemError(
                f"linear algorithm matrix must be square, got shape {matrix.shape}"
            )
        if self.declared_rank < 0:
            raise ValueError("declared rank must be nonnegative")
        object.__setattr__(self, "matrix", _readonly(matrix))
        if self.numerical_rank > self.declared_rank:
            raise ValueError(
                f"numerical rank {self.numerical_rank} exceeds declared rank "
                f"{self.declared_rank}"
            )

    @property
    def size(self) -> int:
        return int(self.matrix.shape[0])

    @cached_property
    def numerical_rank(self) -> int:
        """Count of singular values above rank_tol * sigma_max."""
        if self.size == 0:
            return 0
        singular = np.linalg.svd(self.matrix, compute_uv=False)
        if singular[0] == 0:
            return 0
        return int(np.sum(singular > self.rank_tol * singular[0]))


@dataclass(frozen=True)
class SeparationReport:
    """Linear worst case versus nonlinear recovery on the same witness."""

    dimension: int
    n_rank: int
    cardinality: int
    linear_worst_case: float
    gluskin_bound: float | None
    half_threshold_bound: float | None
    witness_position: int
    witness_frequency: MultiIndex
    witness_weight: float
    nonlinear_error: float
    nonlinear_samples: int
    solver_status: SolverStatus
    seed: int
    flags: tuple[str, ...] = ()

    @property
    def linf_lower_bound(self) -> float:
        """Uniform-norm lower bound; ||h||_inf >= ||h||_2 on [0,1]^d."""
        return self.linear_worst_case

    @property
    def bound_holds(self) -> bool | None:
        if self.gluskin_bound is None:
            return None
        return self.linear_worst_case >= self.gluskin_bound - 1e-9

    def to_row(self) -> dict[str, Any]:
        return {
            "d": self.dimension,
            "n_rank": self.n_rank,
            "cardinality": self.cardinality,
            "linear_worst_case": self.linear_worst_case,
            "gluskin_bound": self.gluskin_bound,
            "half_threshold_bound": self.half_threshold_bound,
            "linf_lower_bound": self.linf_lower_bound,
            "witness": " ".join(str(v) for v in self.witness_frequency),
            "nonlinear_error": self.nonlinear_error,
            "nonlinear_samples": self.nonlinear_samples,
            "seed": self.seed,
            "solver_status": self.solver_status.value,
            "flags": ";".join(self.flags),
        }

    def to_json(self) -> dict[str, Any]:
        payload = self.to_row()
        payload["witness"] = list(self.witness_frequency)
        payload["witness_position"] = self.witness_position
        payload["witness_weight"] = self.witness_weight
        payload["bound_holds"] = self.bound_holds
        payload["flags"] = list(self.flags)
        return payload
