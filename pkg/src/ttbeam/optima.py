"""Approximate minimum/maximum search over tensor trains.

The search treats the squared tensor as an (unnormalized) probability
distribution over multi-indices and keeps, mode by mode, the ``k``
partial assignments of largest mass — a deterministic beam.  For a
right-orthogonalized train the mass of a partial assignment is exactly
the squared norm of its prefix chain product, so each step is one
matrix product plus a row-norm top-k selection.

``optima_tt_max`` finds the largest-modulus element; ``optima_tt``
derives both extremes from it by re-running the search on the tensor
shifted by the first result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import BudgetExceededError
from .tensor import FULL_ELEMENT_BUDGET, TTTensor, tt_const, tt_dif, tt_orth

#: Beam width used when the caller does not specify one.
DEFAULT_BEAM_WIDTH = 100

_DIRECTIONS = ("forward", "backward", "best-of-both")


@dataclass(frozen=True)
class CandidateSet:
    """Final beam state: candidate multi-indices and their chain products.

    Attributes
    ----------
    prefix : ndarray of shape (k_cur, r)
        Prefix chain products of the beam rows.  For a completed sweep
        ``r == 1`` and each entry is the tensor value of its row.
    indices : ndarray of shape (k_cur, i)
        One-based (partial) multi-indices, one row per beam candidate,
        ordered by descending prefix norm.
    """

    prefix: np.ndarray
    indices: np.ndarray

    def __post_init__(self):
        if self.prefix.shape[0] != self.indices.shape[0]:
            raise ValueError(
                f"prefix has {self.prefix.shape[0]} rows, "
                f"indices has {self.indices.shape[0]}"
            )
        if np.unique(self.indices, axis=0).shape[0] != self.indices.shape[0]:
            raise ValueError("beam rows must be pairwise distinct")

    def __len__(self) -> int:
        return self.indices.shape[0]


@dataclass(frozen=True)
class OptimaResult:
    """Both extremes of a train, with the search settings that produced them.

    ``y_min``/``y_max`` are the tensor values at ``i_min``/``i_max``
    (one-based multi-indices); ``y_min <= y_max`` always holds.
    """

    i_min: np.ndarray
    y_min: float
    i_max: np.ndarray
    y_max: float
    k_used: int
    direction: str


def top_k(m, k: int) -> np.ndarray:
    """One-based numbers of the ``k`` rows of largest Euclidean norm.

    Rows are returned in descending-norm order; ties resolve to the lower
    row number.  If ``k`` is at least the number of rows, all rows are
    returned.
    """
    m = np.atleast_2d(np.asarray(m, dtype=np.float64))
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return kernels.top_k_rows(m, int(k)) + 1


def optima_tt_max(
    t: TTTensor, k: int = DEFAULT_BEAM_WIDTH
) -> tuple[np.ndarray, CandidateSet]:
    """Approximate the largest-modulus element of a train by a beam sweep.

    The train is right-orthogonalized on an internal copy, the beam is
    seeded with the first core's row unfolding, and each following core
    expands every candidate over its mode before the top-``k`` selection
    by prefix norm.

    Parameters
    ----------
    t : TTTensor
        Input train (never mutated).
    k : int, optional
        Beam width; with ``k >=`` the total element count no candidate is
        ever pruned and the search is exact.

    Returns
    -------
    idx : ndarray of shape (d,)
        One-based multi-index of the approximate largest-modulus element.
    beam : CandidateSet
        The full final beam — the approximate top-``k`` largest-modulus
        candidates, best first.
    """
    if k < 1:
        raise ValueError(f"beam width must be >= 1, got {k}")
    t_orth = tt_orth(t, allow_rank_reduction=True)
    idx0, vals = kernels.sweep_max(list(t_orth.cores), int(k))
    # The last prefix product of a complete chain is the element value
    # itself, so the first beam row must carry the largest modulus; verify
    # against a re-evaluation on the original train rather than assume it.
    revals = np.abs(t.eval_many(idx0 + 1))
    if revals[0] < revals.max() * (1.0 - 1e-9):
        raise RuntimeError(
            "internal consistency violation: beam head does not attain the "
            "largest re-evaluated modulus"
        )
    beam = CandidateSet(prefix=vals[:, None].copy(), indices=idx0 + 1)
    return idx0[0] + 1, beam


def _beam_candidates(t: TTTensor, k: int, direction: str) -> tuple[np.ndarray, np.ndarray]:
    """Candidate multi-indices of the requested sweep(s), in forward order,
    together with their values under ``t``.  The first row is always the
    best-modulus candidate among the collected beams."""
    _, fwd = optima_tt_max(t, k)
    parts = [fwd.indices]
    if direction != "forward":
        _, bwd = optima_tt_max(t.reverse(), k)
        mapped = np.ascontiguousarray(bwd.indices[:, ::-1])
        parts = [mapped] if direction == "backward" else [fwd.indices, mapped]
    indices = np.vstack(parts)
    values = t.eval_many(indices)
    head = int(np.argmax(np.abs(values)))
    if head != 0:
        order = np.r_[head, np.delete(np.arange(indices.shape[0]), head)]
        indices, values = indices[order], values[order]
    return indices, values


def optima_tt(
    t: TTTensor, k: int = DEFAULT_BEAM_WIDTH, direction: str = "forward"
) -> OptimaResult:
    """Approximate both the minimum and maximum element of a train.

    The first sweep finds the largest-modulus element ``y_1``; depending
    on the sign structure this is the maximum or the minimum.
    Subtracting the constant train filled with ``y_1`` turns the opposite
    extreme into the largest-modulus element of the shifted train, which
    a second sweep targets.  Since each sweep's final beam approximates
    the whole top-``k`` largest-modulus set, both beams' candidates are
    evaluated and the extremes are read off the pooled candidates; for
    ``k = 1`` this degenerates to comparing the two sweep heads.  Pooling
    matters in practice: the shifted train's prefix masses are dominated
    by the constant offset, so its sweep alone occasionally prunes the
    weaker extreme, while the pooled candidates retain it.

    Parameters
    ----------
    t : TTTensor
    k : int, optional
        Beam width for both sweeps.
    direction : {"forward", "backward", "best-of-both"}, optional
        ``forward`` sweeps modes left to right, ``backward`` right to
        left (on the reversed train), ``best-of-both`` pools the
        candidates of both passes.
    """
    if direction not in _DIRECTIONS:
        raise ValueError(f"direction must be one of {_DIRECTIONS}, got {direction!r}")

    idx1, vals1 = _beam_candidates(t, k, direction)
    y1 = float(vals1[0])
    shifted = tt_dif(t, tt_const(t.shape, y1))
    idx2, vals2 = _beam_candidates(shifted, k, direction)
    indices = np.vstack([idx1, idx2])
    values = np.concatenate([vals1, t.eval_many(idx2)])
    jmin = int(np.argmin(values))
    jmax = int(np.argmax(values))
    return OptimaResult(
        i_min=indices[jmin].copy(),
        y_min=float(values[jmin]),
        i_max=indices[jmax].copy(),
        y_max=float(values[jmax]),
        k_used=int(k),
        direction=direction,
    )


def optima_tt_max_bidir(t: TTTensor, k: int = DEFAULT_BEAM_WIDTH) -> np.ndarray:
    """Two-pass variant: sweep from both ends, keep the better candidate.

    The backward pass runs the forward sweep on the reversed train and
    maps its result back to forward mode order.  The returned candidate
    has modulus at least that of the plain forward result.
    """
    fwd, _ = optima_tt_max(t, k)
    bwd_rev, _ = optima_tt_max(t.reverse(), k)
    bwd = bwd_rev[::-1].copy()
    if abs(t.eval(bwd)) > abs(t.eval(fwd)):
        return bwd
    return fwd


def join_first_indices(
    t: TTTensor, j: int, element_budget: int = FULL_ELEMENT_BUDGET
) -> TTTensor:
    """Merge the first ``j`` modes into a single mode of size ``n_1 * ... * n_j``.

    The merged mode enumerates the original indices little-endian: the
    flattened one-based index is ``i_1 + (i_2 - 1) n_1 + (i_3 - 1) n_1 n_2
    + ...``, i.e. the first original index varies fastest.  Element values
    are preserved; the result has ``d - j + 1`` modes.  Searching the
    joined train tightens the worst-case accuracy bound, at the price of a
    first core with ``n_1 * ... * n_j * r_j`` entries.

    Parameters
    ----------
    t : TTTensor
    j : int
        Number of leading modes to merge, ``1 <= j < d``; ``j = 1``
        returns the input unchanged.
    element_budget : int, optional
        Cap on both the merged mode size and the merged core's element
        count.

    Raises
    ------
    BudgetExceededError
        If the merged mode or core would exceed the budget.
    """
    d = t.ndim
    if not 1 <= j < d:
        raise ValueError(f"j must satisfy 1 <= j < d = {d}, got {j}")
    if j == 1:
        return t
    merged_size = math.prod(t.shape[:j])
    r_j = t.cores[j - 1].shape[2]
    if merged_size > element_budget or merged_size * r_j > element_budget:
        raise BudgetExceededError(
            f"joined mode needs {merged_size} indices and {merged_size * r_j} "
            f"core entries, budget is {element_budget}"
        )
    # Fold cores left to right; keeping the new mode index slowest makes
    # the flattened row order little-endian in the original indices.
    acc = t.cores[0][0]  # (n_1, r_1)
    for core in t.cores[1:j]:
        acc = np.einsum("pr,rnq->npq", acc, core).reshape(-1, core.shape[2])
    merged = np.ascontiguousarray(acc[None, :, :])
    return TTTensor([merged, *t.cores[j:]], copy=False)


def split_joined_index(shape, j: int, flat: int) -> np.ndarray:
    """Invert the little-endian flattening of :func:`join_first_indices`.

    Given the one-based ``flat`` index within the merged mode, returns the
    one-based original indices ``(i_1, ..., i_j)``.
    """
    rem = int(flat) - 1
    if rem < 0 or rem >= math.prod(shape[:j]):
        raise ValueError(f"flat index {flat} out of range for shape {shape[:j]}")
    out = np.empty(j, dtype=np.int64)
    for axis in range(j):
        out[axis] = rem % shape[axis] + 1
        rem //= shape[axis]
    return out
