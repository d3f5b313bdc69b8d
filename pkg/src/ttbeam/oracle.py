"""Brute-force ground truth on dense arrays.

Everything here scans dense NumPy arrays directly and deliberately shares
no code with the tensor-train layer, so these functions can serve as
independent oracles in tests.  Ties always resolve to the first
occurrence in lexicographic (C-order) index order, matching the
lower-row tie rule of the beam's top-k selection.  Multi-indices are
one-based, like the rest of the public API.
"""

from __future__ import annotations

import numpy as np


def brute_min_max(full) -> tuple[np.ndarray, float, np.ndarray, float]:
    """Exact extremes of a dense array by linear scan.

    Returns ``(idx_min, y_min, idx_max, y_max)`` with one-based
    multi-indices; first occurrence wins on ties.
    """
    full = np.asarray(full, dtype=np.float64)
    if full.size == 0:
        raise ValueError("cannot scan an empty array")
    flat_min = int(np.argmin(full))
    flat_max = int(np.argmax(full))
    idx_min = np.array(np.unravel_index(flat_min, full.shape), dtype=np.int64) + 1
    idx_max = np.array(np.unravel_index(flat_max, full.shape), dtype=np.int64) + 1
    return idx_min, float(full.flat[flat_min]), idx_max, float(full.flat[flat_max])


def brute_marginal(full, partial, mode: int) -> np.ndarray:
    """Conditional marginal of coordinate ``mode`` under the squared array.

    Squares the entries, fixes the one-based ``partial`` prefix (length
    ``mode - 1``), sums over all trailing modes, and normalizes.

    Raises
    ------
    ValueError
        If ``mode`` does not follow the prefix, or the prefix is invalid.
    ZeroDivisionError
        If the prefix carries zero total mass.
    """
    full = np.asarray(full, dtype=np.float64)
    partial = tuple(int(j) for j in partial)
    if mode != len(partial) + 1:
        raise ValueError(
            f"mode must equal len(partial) + 1 = {len(partial) + 1}, got {mode}"
        )
    if mode > full.ndim:
        raise ValueError(f"mode {mode} exceeds array dimension {full.ndim}")
    for axis, j in enumerate(partial):
        if not 1 <= j <= full.shape[axis]:
            raise ValueError(
                f"index {j} out of range 1..{full.shape[axis]} in mode {axis + 1}"
            )
    sq = full**2
    block = sq[tuple(j - 1 for j in partial)]
    mass = block.reshape(block.shape[0], -1).sum(axis=1)
    total = mass.sum()
    if total <= 0.0:
        raise ZeroDivisionError("prefix has zero total mass")
    return mass / total


def brute_top_abs(full, k: int) -> tuple[np.ndarray, np.ndarray]:
    """The ``k`` largest-modulus entries with their one-based indices.

    Returns ``(indices, values)`` where ``indices`` has shape
    ``(min(k, size), ndim)`` and rows are ordered by descending modulus,
    ties by index order; ``values`` are the signed entries.
    """
    full = np.asarray(full, dtype=np.float64)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    flat = full.reshape(-1)
    order = np.argsort(-np.abs(flat), kind="stable")[: min(k, flat.size)]
    indices = np.stack(np.unravel_index(order, full.shape), axis=1) + 1
    return indices.astype(np.int64), flat[order]
