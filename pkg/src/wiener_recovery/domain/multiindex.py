"""Frequency index sets Λ ⊂ Z^d with deterministic lexicographic enumeration."""

from typing import Any, Iterable

import numpy as np

from .errors import CardinalityCapError, DimensionMismatchError
from .models import IndexSet, MultiIndex

DEFAULT_CARDINALITY_CAP = 10**7


def cube_cardinality(d: int, m: int) -> int:
    """(2m+1)^d, the size of the cube [-m, m]^d ∩ Z^d."""
    return (2 * m + 1) ** d


def cube_index_set(d: int, m: int, cap: int = DEFAULT_CARDINALITY_CAP) -> IndexSet:
    """
    Enumerate the cube Λ = [-m, m]^d ∩ Z^d in lexicographic order.

    Args:
        d: Ambient dimension, at least 1
        m: Cube radius, at least 0
        cap: Largest admissible cardinality

    Returns:
        IndexSet with exactly (2m+1)^d members

    Raises:
        ValueError: If d < 1 or m < 0
        CardinalityCapError: If (2m+1)^d exceeds cap
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if m < 0:
        raise ValueError(f"cube radius must be >= 0, got {m}")
    size = cube_cardinality(d, m)
    if size > cap:
        raise CardinalityCapError(f"cube [-{m},{m}]^{d} cardinality", size, cap)
    # C-order flattening of np.indices enumerates rows lexicographically
    grid = np.indices((2 * m + 1,) * d, dtype=np.int64).reshape(d, -1).T - m
    return IndexSet(d, grid)


def index_set_from(d: int, indices: Iterable[Any]) -> IndexSet:
    """Build an IndexSet from arbitrary frequencies, sorting and deduplicating."""
    rows = np.asarray(list(indices), dtype=np.int64)
    if rows.size == 0:
        return IndexSet(d, np.zeros((0, d), dtype=np.int64))
    if rows.ndim == 1:
        rows = rows.reshape(-1, 1) if d == 1 else rows.reshape(1, -1)
    if rows.shape[1] != d:
        raise DimensionMismatchError(
            f"expected frequencies of length {d}, got length {rows.shape[1]}"
        )
    return IndexSet(d, np.unique(rows, axis=0))


def index_set_from_json(payload: list[list[int]], d: int | None = None) -> IndexSet:
    """Inverse of ``IndexSet.to_json``."""
    if not payload:
        if d is None:
            raise ValueError("an empty index set needs an explicit dimension")
        return IndexSet(d, np.zeros((0, d), dtype=np.int64))
    dimension = len(payload[0]) if d is None else d
    return index_set_from(dimension, payload)


def position_of(index_set: IndexSet, k: MultiIndex | Iterable[int]) -> int | None:
    """
    Column position of a frequency in the sorted enumeration.

    Raises:
        DimensionMismatchError: If len(k) differs from the set's dimension
    """
    key = tuple(int(v) for v in k)
    if len(key) != index_set.dimension:
        raise DimensionMismatchError(
            f"frequency of length {len(key)} in a {index_set.dimension}-d set"
        )
    position = int(index_set.positions(np.asarray([key], dtype=np.int64))[0])
    return None if position < 0 else position


def permute_coordinates(index_set: IndexSet, permutation: Iterable[int]) -> IndexSet:
    """Apply a coordinate permutation π to every member and re-sort."""
    order = list(permutation)
    if sorted(order) != list(range(index_set.dimension)):
        raise ValueError(f"{order} is not a permutation of the coordinates")
    return index_set_from(index_set.dimension, index_set.indices[:, order])
