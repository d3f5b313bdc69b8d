"""Pure-NumPy kernels: reference implementation of the compiled core.

Both backends operate on raw core lists (C-contiguous float64 arrays of
shape ``(r_prev, n, r_next)``) with zero-based indices.  Input validation
happens in the public API layer, not here.
"""

import numpy as np

BACKEND_NAME = "python"


def top_k_rows(m, k):
    """Row numbers of ``m`` with the ``k`` largest Euclidean norms.

    Returned in descending-norm order; ties resolve to the lower row
    number (stable sort), so the selection is deterministic.
    """
    norms = np.einsum("ij,ij->i", m, m)
    order = np.argsort(-norms, kind="stable")
    return order[: min(k, m.shape[0])]


def eval_indices(cores, idx):
    """Chain-evaluate the tensor at a batch of zero-based multi-indices.

    ``idx`` has shape ``(b, d)``; returns ``(b,)`` values, each the product
    of the per-core slices selected by one row.
    """
    v = cores[0][0, idx[:, 0], :]
    for i in range(1, len(cores)):
        g = cores[i][:, idx[:, i], :]
        v = np.einsum("br,rbq->bq", v, g)
    return np.ascontiguousarray(v[:, 0])


def sweep_max(cores, k):
    """Beam sweep for the largest-modulus elements of a right-orthogonal train.

    Seeds the beam with the first core's row unfolding, then repeatedly
    multiplies the beam's prefix products into the next core's unfolding,
    extends the partial indices over the new mode, and keeps the ``k``
    rows of largest norm.  For a right-orthogonal train the squared row
    norms are exactly the unnormalized marginals of the squared tensor,
    which is what makes the greedy selection meaningful.

    Parameters
    ----------
    cores : list of ndarray
        Right-orthogonalized cores; the last core must have trailing
        rank 1.
    k : int
        Beam width (number of candidates kept per step).

    Returns
    -------
    idx : ndarray of shape (k_cur, d), int64
        Zero-based candidate multi-indices, in descending order of the
        modulus of their tensor values; ``k_cur = min(k, total elements)``.
    vals : ndarray of shape (k_cur,)
        The tensor values at those multi-indices (signed; the final
        prefix product of a complete chain is the element itself).
    """
    q = cores[0][0]
    idx = np.arange(cores[0].shape[1], dtype=np.int64)[:, None]
    order = top_k_rows(q, k)
    q, idx = q[order], idx[order]
    for i in range(1, len(cores)):
        r_prev, n, r_next = cores[i].shape
        z = q @ cores[i].reshape(r_prev, n * r_next)
        q = z.reshape(-1, r_next)
        idx = np.hstack(
            [
                np.repeat(idx, n, axis=0),
                np.tile(np.arange(n, dtype=np.int64), idx.shape[0])[:, None],
            ]
        )
        order = top_k_rows(q, k)
        q, idx = q[order], idx[order]
    return np.ascontiguousarray(idx), np.ascontiguousarray(q[:, 0])
