"""Probabilistic view of a tensor train: marginals and sampling.

The squared tensor, normalized by its total mass, defines a probability
distribution over multi-indices.  For a right-orthogonalized train the
unnormalized marginal mass of a partial assignment ``(j_1, ..., j_l)``
equals the squared Euclidean norm of the prefix chain product
``G_1[1, j_1, :] @ ... @ G_l[:, j_l, :]`` — summing the squared tensor
over all trailing modes collapses, slice by slice, through the Gram
identity of the orthogonalized cores.  This turns exact conditional
marginals, and therefore exact sequential sampling, into a handful of
small matrix products.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ZeroMassError
from .tensor import FULL_ELEMENT_BUDGET, TTTensor, gram_residual, tt_orth

#: Largest Gram residual a train may have and still count as orthogonalized.
ORTH_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class MarginalTable:
    """Conditional distribution of one coordinate given a fixed prefix.

    Attributes
    ----------
    probs : ndarray
        Non-negative probabilities over the mode's indices, summing to 1.
    conditioning : ndarray
        The one-based partial multi-index being conditioned on (may be
        empty).
    norm_const : float
        Unnormalized mass of the conditioning prefix (the per-step
        constant; the global normalization constant is never formed).
    """

    probs: np.ndarray
    conditioning: np.ndarray
    norm_const: float


def prefix_marginal(
    t: TTTensor, partial=(), orthogonalize: bool = False
) -> MarginalTable:
    """Exact conditional marginal of the next coordinate under the squared train.

    With ``partial`` of length ``l - 1``, entry ``n`` of the table is
    proportional to ``|| prefix @ G_l[:, n, :] ||^2``, which for a
    right-orthogonal train equals the sum of the squared tensor over all
    trailing modes — the exact conditional mass.

    Parameters
    ----------
    t : TTTensor
        A right-orthogonalized train, unless ``orthogonalize`` is set.
    partial : sequence of int, optional
        One-based indices fixing coordinates ``1 .. l-1``.
    orthogonalize : bool, optional
        Orthogonalize internally instead of requiring it of the caller.

    Raises
    ------
    ValueError
        If the train is not orthogonal (Gram residual above
        ``ORTH_RESIDUAL_TOL``) and ``orthogonalize`` is False, or the
        partial index is invalid.
    ZeroMassError
        If the conditioning prefix has zero mass: the conditional
        distribution does not exist and renormalizing would be noise.
    """
    if orthogonalize:
        t = tt_orth(t, allow_rank_reduction=True)
    else:
        resid = gram_residual(t)
        if resid > ORTH_RESIDUAL_TOL:
            raise ValueError(
                f"train is not right-orthogonal (Gram residual {resid:.3e} > "
                f"{ORTH_RESIDUAL_TOL:.0e}); orthogonalize it or pass "
                "orthogonalize=True"
            )
    partial = np.asarray(partial, dtype=np.int64).reshape(-1)
    mode = len(partial)  # zero-based mode whose table we build
    if mode >= t.ndim:
        raise ValueError(
            f"partial index of length {mode} leaves no coordinate to "
            f"marginalize in a {t.ndim}-mode train"
        )
    v = np.ones((1,))
    for axis, j in enumerate(partial):
        n_axis = t.shape[axis]
        if not 1 <= j <= n_axis:
            raise ValueError(f"index {j} out of range 1..{n_axis} in mode {axis + 1}")
        v = v @ t.cores[axis][:, j - 1, :]
    w = np.einsum("r,rnq->nq", v, t.cores[mode])
    mass = np.einsum("nq,nq->n", w, w)
    total = float(mass.sum())
    if total <= 0.0:
        raise ZeroMassError(
            f"prefix {tuple(int(j) for j in partial)} has zero mass; "
            "no conditional distribution exists"
        )
    return MarginalTable(probs=mass / total, conditioning=partial, norm_const=total)


def sample(t: TTTensor, count: int, seed=None) -> np.ndarray:
    """Draw i.i.d. multi-indices distributed as the normalized squared train.

    Each coordinate is drawn in turn from its exact conditional marginal
    (inverse-CDF over the per-mode table), so a full multi-index costs
    ``d`` univariate draws; all ``count`` samples advance through the
    train together.

    Parameters
    ----------
    t : TTTensor
        Any train with nonzero mass; orthogonalized internally.
    count : int
        Number of samples, >= 1.
    seed : int, sequence of int, or numpy Generator, optional
        Same seed, same sample sequence.

    Returns
    -------
    ndarray of shape (count, d), int64
        One-based multi-indices.

    Raises
    ------
    ZeroMassError
        If the train is identically zero (no distribution to sample).
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    t_orth = tt_orth(t, allow_rank_reduction=True)
    rng = np.random.default_rng(seed)
    out = np.empty((count, t.ndim), dtype=np.int64)
    v = np.ones((count, 1))
    for axis, core in enumerate(t_orth.cores):
        w = np.einsum("br,rnq->bnq", v, core)
        mass = np.einsum("bnq,bnq->bn", w, w)
        cdf = np.cumsum(mass, axis=1)
        totals = cdf[:, -1]
        if np.any(totals <= 0.0):
            raise ZeroMassError(
                "zero-mass branch encountered while sampling (is the train "
                "identically zero?)"
            )
        u = rng.random(count) * totals
        choice = (u[:, None] >= cdf).sum(axis=1)
        out[:, axis] = choice + 1
        v = w[np.arange(count), choice, :]
    return out


@dataclass(frozen=True)
class BeamMarginalReport:
    """Outcome of replaying a beam sweep against brute-force marginals."""

    max_discrepancy: float
    step_discrepancies: list = field(default_factory=list)


def beam_marginal_check(
    t: TTTensor, k: int, element_budget: int = FULL_ELEMENT_BUDGET
) -> BeamMarginalReport:
    """Verify that beam prefix norms are exact marginal masses, step by step.

    Replays the beam sweep on an orthogonalized copy and, at every step
    and for every beam row, compares the squared prefix norm against the
    brute-force sum of the squared (densified) tensor over all trailing
    modes given that row's partial index.  Diagnostic only: returns the
    largest absolute discrepancy seen instead of raising.

    Requires densification, so it is limited to small trains.
    """
    if k < 1:
        raise ValueError(f"beam width must be >= 1, got {k}")
    full_sq = t.to_full(element_budget=element_budget) ** 2
    t_orth = tt_orth(t, allow_rank_reduction=True)
    cores = t_orth.cores
    d = t.ndim

    steps = []
    q = cores[0][0]
    norms = np.einsum("ij,ij->i", q, q)
    brute = full_sq.reshape(t.shape[0], -1).sum(axis=1)
    steps.append(float(np.abs(norms - brute).max()))
    order = kernels.top_k_rows(q, k)
    q = q[order]
    idx = order[:, None]

    for i in range(1, d):
        r_prev, n, r_next = cores[i].shape
        q = (q @ cores[i].reshape(r_prev, n * r_next)).reshape(-1, r_next)
        norms = np.einsum("ij,ij->i", q, q).reshape(-1, n)
        # Trailing-mode sums of the squared tensor for every (prefix, n) pair.
        gathered = full_sq[tuple(idx.T)]
        brute = gathered.reshape(idx.shape[0], n, -1).sum(axis=2)
        steps.append(float(np.abs(norms - brute).max()))
        idx = np.hstack(
            [
                np.repeat(idx, n, axis=0),
                np.tile(np.arange(n, dtype=np.int64), idx.shape[0])[:, None],
            ]
        )
        order = kernels.top_k_rows(q, k)
        q = q[order]
        idx = idx[order]

    return BeamMarginalReport(
        max_discrepancy=max(steps), step_discrepancies=steps
    )
