"""Tensor-train data structure and elementary format operations.

A :class:`TTTensor` represents a ``d``-dimensional array as a chain of
three-way cores ``G_1, ..., G_d``, where core ``i`` has shape
``(r_{i-1}, n_i, r_i)`` (leading rank, mode size, trailing rank) stored
row-major, and the boundary ranks are ``r_0 = r_d = 1``.  The element at
multi-index ``(j_1, ..., j_d)`` is the chain product
``G_1[1, j_1, :] @ G_2[:, j_2, :] @ ... @ G_d[:, j_d, 1]``.

Index convention
----------------
The public API is one-based: multi-index entries run from 1 to the mode
size, matching the usual mathematical notation for tensor entries.
Internal storage and the kernel layer are zero-based; the conversion
happens exactly once, at the API boundary.

All scalars are 64-bit floats.  Tensors are immutable after construction
(core arrays are marked read-only) and every operation returns a new
tensor, so values can be shared freely across threads.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import BudgetExceededError, RankChainError

#: Default cap on the number of elements any densification may materialize.
FULL_ELEMENT_BUDGET = 50_000_000


class TTTensor:
    """A tensor in tensor-train format: an ordered list of three-way cores.

    Parameters
    ----------
    cores : sequence of ndarray
        Cores of shape ``(r_{i-1}, n_i, r_i)``.  Consecutive trailing and
        leading ranks must agree, the first leading and last trailing
        rank must be 1, and every entry must be finite.
    copy : bool, optional
        If True (default), the cores are copied; pass False only for
        freshly created arrays that no one else holds a reference to.

    Raises
    ------
    RankChainError
        If the rank chain is inconsistent.
    ValueError
        If a core has the wrong number of axes or non-finite entries.
    """

    __slots__ = ("cores",)

    def __init__(self, cores: Sequence[np.ndarray], copy: bool = True):
        if len(cores) == 0:
            raise ValueError("a tensor train needs at least one core")
        validated = []
        for i, core in enumerate(cores):
            arr = np.ascontiguousarray(core, dtype=np.float64)
            if copy and arr is core:
                arr = arr.copy()
            if arr.ndim != 3:
                raise ValueError(f"core {i + 1} must be three-way, got {arr.ndim} axes")
            if min(arr.shape) < 1:
                raise ValueError(f"core {i + 1} has an empty axis: {arr.shape}")
            if not np.isfinite(arr).all():
                raise ValueError(f"core {i + 1} contains non-finite entries")
            validated.append(arr)
        if validated[0].shape[0] != 1:
            raise RankChainError(
                f"first core must have leading rank 1, got {validated[0].shape[0]}"
            )
        if validated[-1].shape[2] != 1:
            raise RankChainError(
                f"last core must have trailing rank 1, got {validated[-1].shape[2]}"
            )
        for i in range(len(validated) - 1):
            if validated[i].shape[2] != validated[i + 1].shape[0]:
                raise RankChainError(
                    f"trailing rank {validated[i].shape[2]} of core {i + 1} does not "
                    f"match leading rank {validated[i + 1].shape[0]} of core {i + 2}"
                )
        for arr in validated:
            arr.flags.writeable = False
        self.cores = tuple(validated)

    # ------------------------------------------------------------------
    # Shape metadata
    # ------------------------------------------------------------------

    @property
    def ndim(self) -> int:
        """Number of modes ``d``."""
        return len(self.cores)

    @property
    def shape(self) -> tuple[int, ...]:
        """Mode sizes ``(n_1, ..., n_d)``."""
        return tuple(c.shape[1] for c in self.cores)

    @property
    def ranks(self) -> tuple[int, ...]:
        """The rank chain ``(r_0, r_1, ..., r_d)`` with ``r_0 = r_d = 1``."""
        return tuple(c.shape[0] for c in self.cores) + (1,)

    @property
    def size(self) -> int:
        """Total number of elements of the represented dense array."""
        return math.prod(self.shape)

    def __repr__(self) -> str:
        return f"TTTensor(shape={self.shape}, ranks={self.ranks})"

    # ------------------------------------------------------------------
    # Element access
    # ------------------------------------------------------------------

    def _indices_to_internal(self, idx) -> np.ndarray:
        """Convert one-based multi-indices to a validated (b, d) int64 array."""
        arr = np.asarray(idx, dtype=np.int64)
        single = arr.ndim == 1
        if single:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[1] != self.ndim:
            raise ValueError(
                f"expected multi-indices of length {self.ndim}, got shape {arr.shape}"
            )
        shape = np.asarray(self.shape, dtype=np.int64)
        if np.any(arr < 1) or np.any(arr > shape):
            bad = np.argwhere((arr < 1) | (arr > shape))[0]
            raise ValueError(
                f"index {arr[bad[0], bad[1]]} out of range 1..{shape[bad[1]]} "
                f"in mode {bad[1] + 1}"
            )
        return np.ascontiguousarray(arr - 1), single

    def eval(self, idx) -> float:
        """Element at a one-based multi-index, as the chain product of slices.

        Cost is ``O(d * r^2)`` through a left-to-right sequence of
        vector-matrix products.

        Parameters
        ----------
        idx : sequence of int
            One-based multi-index of length ``d``.

        Returns
        -------
        float
        """
        internal, _ = self._indices_to_internal(idx)
        return float(kernels.eval_indices(list(self.cores), internal)[0])

    def eval_many(self, idx) -> np.ndarray:
        """Elements at a batch of one-based multi-indices of shape ``(b, d)``."""
        internal, single = self._indices_to_internal(idx)
        vals = kernels.eval_indices(list(self.cores), internal)
        return vals[0] if single else vals

    def to_full(self, element_budget: int = FULL_ELEMENT_BUDGET) -> np.ndarray:
        """Densify into a NumPy array of shape ``self.shape``.

        Parameters
        ----------
        element_budget : int, optional
            Cap on the number of elements of any array materialized along
            the way (intermediate chain products included).

        Raises
        ------
        BudgetExceededError
            If the result or an intermediate would exceed the budget.
        """
        elems = 1
        peak = 0
        for core in self.cores:
            elems *= core.shape[1]
            peak = max(peak, elems * core.shape[2])
        if peak > element_budget:
            raise BudgetExceededError(
                f"densification needs {peak} elements, budget is {element_budget}"
            )
        out = self.cores[0].reshape(self.cores[0].shape[1], -1)
        for core in self.cores[1:]:
            r_prev, n, r_next = core.shape
            out = out @ core.reshape(r_prev, n * r_next)
            out = out.reshape(-1, r_next)
        return out.reshape(self.shape)

    def reverse(self) -> "TTTensor":
        """The same values with the mode order reversed.

        Core ``i`` of the result is core ``d + 1 - i`` of the input with
        its rank axes swapped, so ``reverse(t).eval(idx[::-1]) == t.eval(idx)``.
        """
        rev = [np.ascontiguousarray(c.transpose(2, 1, 0)) for c in self.cores[::-1]]
        return TTTensor(rev, copy=False)

    def __add__(self, other):
        if isinstance(other, TTTensor):
            return tt_add(self, other)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, TTTensor):
            return tt_dif(self, other)
        return NotImplemented


# ----------------------------------------------------------------------
# Constructors
# ----------------------------------------------------------------------


def tt_const(shape: Iterable[int], v: float) -> TTTensor:
    """Rank-1 train whose every element equals ``v``.

    The first ``d - 1`` cores are filled with ``|v|**(1/d)`` and the last
    with ``sign(v) * |v|**(1/d)``; for ``v = 0`` all cores are zero.

    Notes
    -----
    The d-th-root construction reproduces ``v`` to relative (not absolute)
    precision, so elementwise tolerances for constant trains should be
    stated relative to ``|v|``.
    """
    shape = tuple(int(n) for n in shape)
    if len(shape) == 0:
        raise ValueError("shape must have at least one mode")
    if min(shape) < 1:
        raise ValueError(f"mode sizes must be >= 1, got {shape}")
    d = len(shape)
    v = float(v)
    root = abs(v) ** (1.0 / d) if v != 0.0 else 0.0
    cores = [np.full((1, n, 1), root) for n in shape]
    if v < 0.0:
        cores[-1] = -cores[-1]
    return TTTensor(cores, copy=False)


def tt_random(shape: Iterable[int], ranks, seed=None) -> TTTensor:
    """Train with cores drawn i.i.d. from the standard normal distribution.

    Parameters
    ----------
    shape : iterable of int
        Mode sizes.
    ranks : int or sequence of int
        Internal ranks ``r_1, ..., r_{d-1}`` (a single int is repeated);
        ignored for ``d = 1``.  All must be >= 1.
    seed : int, sequence of int, or numpy Generator, optional
        Anything accepted by :func:`numpy.random.default_rng`.  The same
        seed reproduces the tensor bit for bit.
    """
    shape = tuple(int(n) for n in shape)
    if len(shape) == 0:
        raise ValueError("shape must have at least one mode")
    if min(shape) < 1:
        raise ValueError(f"mode sizes must be >= 1, got {shape}")
    d = len(shape)
    if isinstance(ranks, (int, np.integer)):
        inner = (int(ranks),) * (d - 1)
    else:
        inner = tuple(int(r) for r in ranks)
    if len(inner) != d - 1:
        raise RankChainError(
            f"expected {d - 1} internal ranks for {d} modes, got {len(inner)}"
        )
    if any(r < 1 for r in inner):
        raise RankChainError(f"ranks must be >= 1, got {inner}")
    chain = (1,) + inner + (1,)
    rng = np.random.default_rng(seed)
    cores = [
        rng.standard_normal((chain[i], shape[i], chain[i + 1])) for i in range(d)
    ]
    return TTTensor(cores, copy=False)


# ----------------------------------------------------------------------
# Format operations
# ----------------------------------------------------------------------


def _require_same_shape(a: TTTensor, b: TTTensor):
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")


def tt_add(a: TTTensor, b: TTTensor) -> TTTensor:
    """Element-wise sum of two trains with identical mode sizes.

    The result's cores are block-structured: the first core stacks the
    operands' first cores side by side, interior cores are block-diagonal,
    and the last core stacks vertically.  Internal ranks therefore add:
    ``r_i = r_i(a) + r_i(b)``.
    """
    _require_same_shape(a, b)
    d = a.ndim
    if d == 1:
        return TTTensor([a.cores[0] + b.cores[0]], copy=False)
    cores = [np.concatenate([a.cores[0], b.cores[0]], axis=2)]
    for ca, cb in zip(a.cores[1:-1], b.cores[1:-1]):
        ra_p, n, ra_n = ca.shape
        rb_p, _, rb_n = cb.shape
        block = np.zeros((ra_p + rb_p, n, ra_n + rb_n))
        block[:ra_p, :, :ra_n] = ca
        block[ra_p:, :, ra_n:] = cb
        cores.append(block)
    cores.append(np.concatenate([a.cores[-1], b.cores[-1]], axis=0))
    return TTTensor(cores, copy=False)


def tt_dif(a: TTTensor, b: TTTensor) -> TTTensor:
    """Element-wise difference ``a - b``: the sum with ``b``'s last core negated."""
    _require_same_shape(a, b)
    if a.ndim == 1:
        return TTTensor([a.cores[0] - b.cores[0]], copy=False)
    neg_last = TTTensor(b.cores[:-1] + (-b.cores[-1],), copy=False)
    return tt_add(a, neg_last)


def tt_orth(t: TTTensor, allow_rank_reduction: bool = False) -> TTTensor:
    """Right-orthogonalize: same element values, Gram-orthonormal cores 2..d.

    Sweeps right to left.  At each core the row unfolding
    ``A = reshape(G_i, (r_{i-1}, n_i * r_i))`` is factored as ``A = R @ Q``
    with ``Q`` having orthonormal rows (computed as the thin QR of ``A.T``),
    ``Q`` becomes the new core and ``R`` is absorbed into the left
    neighbour.  Afterwards every core ``i >= 2`` satisfies
    ``sum_j G_i[:, j, :] @ G_i[:, j, :].T == identity``.

    Parameters
    ----------
    t : TTTensor
        Input train; never mutated.
    allow_rank_reduction : bool, optional
        A rank ``r_{i-1} > n_i * r_i`` is too large for orthonormal rows
        to exist at the full size.  By default such cores are rejected;
        with this flag the thin factorization shrinks the rank to
        ``n_i * r_i`` instead, which is lossless (element values are
        preserved exactly).

    Raises
    ------
    RankChainError
        If a core violates the rank precondition and reduction is not
        allowed; the message names the offending core.
    """
    cores = [c.copy() for c in t.cores]
    for i in range(len(cores) - 1, 0, -1):
        r_prev, n, r_next = cores[i].shape
        m = n * r_next
        if r_prev > m and not allow_rank_reduction:
            raise RankChainError(
                f"core {i + 1} has leading rank {r_prev} > {n} * {r_next}; "
                "orthonormal rows cannot exist at this size "
                "(pass allow_rank_reduction=True for a lossless reduction)"
            )
        a = cores[i].reshape(r_prev, m)
        q_t, r_t = np.linalg.qr(a.T)
        new_rank = q_t.shape[1]
        cores[i] = np.ascontiguousarray(q_t.T).reshape(new_rank, n, r_next)
        left = cores[i - 1]
        lp, ln, lr = left.shape
        cores[i - 1] = (left.reshape(lp * ln, lr) @ r_t.T).reshape(lp, ln, new_rank)
    return TTTensor(cores, copy=False)


def gram_residual(t: TTTensor) -> float:
    """Largest Frobenius deviation of cores 2..d from the row-Gram identity.

    Zero (up to rounding) exactly when the train is right-orthogonal.
    For a single-core train the residual is 0 by convention.
    """
    worst = 0.0
    for core in t.cores[1:]:
        r_prev = core.shape[0]
        gram = np.einsum("inj,knj->ik", core, core)
        worst = max(worst, float(np.linalg.norm(gram - np.eye(r_prev))))
    return worst
