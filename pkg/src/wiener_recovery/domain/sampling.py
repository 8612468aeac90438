"""I.i.d. uniform sampling points, trigonometric evaluation and measurement matrices."""

import math
from typing import Any, Mapping

import numpy as np

from .errors import CardinalityCapError, DimensionMismatchError
from .models import (
    CoefficientVector,
    ComplexArray,
    IndexSet,
    MeasurementMatrix,
    PointSet,
)

DEFAULT_MATRIX_ENTRY_CAP = 50_000_000
EVALUATION_ROW_CHUNK = 2048
_SEED_MASK = (1 << 64) - 1


def trial_seed(seed: int, trial: int) -> int:
    """Substream seed for one trial: seed XOR trial index, kept in 64 bits."""
    return (int(seed) ^ int(trial)) & _SEED_MASK


def generator(seed: int) -> np.random.Generator:
    """The counter-based generator every random draw in the package goes through."""
    return np.random.Generator(np.random.Philox(int(seed) & _SEED_MASK))


def draw_uniform(n: int, d: int, seed: int) -> PointSet:
    """
    Draw n i.i.d. uniform points in [0, 1)^d.

    Args:
        n: Number of points, at least 1
        d: Dimension, at least 1
        seed: Philox key; identical (n, d, seed) give identical point sets

    Returns:
        PointSet carrying its seed so it can be serialized and regenerated
    """
    if n < 1:
        raise ValueError(f"need at least one point, got n={n}")
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    points = generator(seed).random((n, d))
    return PointSet(d, points, seed=int(seed))


def point_set_from_json(payload: Mapping[str, Any]) -> PointSet:
    """Regenerate a PointSet from its {"d", "seed", "n"} record."""
    return draw_uniform(int(payload["n"]), int(payload["d"]), int(payload["seed"]))


def equispaced_grid(d: int, m: int) -> PointSet:
    """The lattice {j/(2m+1)}^d; cube(d, m) characters are orthogonal on it."""
    if d < 1 or m < 0:
        raise ValueError(f"need d >= 1 and m >= 0, got d={d}, m={m}")
    side = 2 * m + 1
    lattice = np.indices((side,) * d, dtype=np.float64).reshape(d, -1).T / side
    return PointSet(d, lattice)


def _phases(points: np.ndarray, indices: np.ndarray) -> np.ndarray:
    # ⟨k, x⟩ mod 1 before scaling by 2π
    inner = points @ indices.T.astype(np.float64)
    return 2 * math.pi * np.mod(inner, 1.0)


def _characters(points: np.ndarray, indices: np.ndarray) -> ComplexArray:
    return np.exp(1j * _phases(points, indices))


def evaluate(c: CoefficientVector, points: PointSet) -> ComplexArray:
    """
    f(x) = Σ_k c_k e^{2πi⟨k,x⟩} at every point, by direct summation.

    Rows are processed in fixed-size chunks, so the result does not depend on
    how many points are evaluated at once.
    """
    if c.dimension != points.dimension:
        raise DimensionMismatchError(
            f"{c.dimension}-d coefficients evaluated at {points.dimension}-d points"
        )
    values = np.zeros(len(points), dtype=np.complex128)
    if c.support_size == 0:
        return values
    for start in range(0, len(points), EVALUATION_ROW_CHUNK):
        chunk = points.points[start : start + EVALUATION_ROW_CHUNK]
        block = _characters(chunk, c.indices)
        values[start : start + len(chunk)] = block @ c.amplitudes
    return values


def measurement_matrix(
    index_set: IndexSet, points: PointSet, entry_cap: int = DEFAULT_MATRIX_ENTRY_CAP
) -> MeasurementMatrix:
    """
    Assemble G[j, l] = e^{2πi⟨k_l, x_j⟩} with columns in the order of the index set.

    Raises:
        DimensionMismatchError: If the index set and points differ in dimension
        CardinalityCapError: If rows * cols exceeds entry_cap
    """
    if index_set.dimension != points.dimension:
        raise DimensionMismatchError(
            f"{index_set.dimension}-d index set against {points.dimension}-d points"
        )
    entries = len(points) * len(index_set)
    if entries > entry_cap:
        raise CardinalityCapError("measurement matrix entry count", entries, entry_cap)
    return MeasurementMatrix(_characters(points.points, index_set.indices))
