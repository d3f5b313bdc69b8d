# cython: language_level=3
# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled kernels: beam sweep and batched element evaluation.

Mirrors ``_ref`` exactly (same selection rule, same tie-breaking); chain
ranks are small in every workload this library targets, so hand-rolled
inner loops beat per-call dispatch overhead by a wide margin.
"""

from libc.stdlib cimport malloc, free, qsort

import numpy as np

BACKEND_NAME = "compiled"


cdef struct NormRow:
    double norm
    Py_ssize_t row


cdef int _cmp_norm_row(const void* a, const void* b) noexcept nogil:
    # Descending norm, ties to the lower row number.
    cdef const NormRow* x = <const NormRow*> a
    cdef const NormRow* y = <const NormRow*> b
    if x.norm > y.norm:
        return -1
    if x.norm < y.norm:
        return 1
    if x.row < y.row:
        return -1
    if x.row > y.row:
        return 1
    return 0


cdef struct CoreMeta:
    const double* data
    Py_ssize_t rp      # leading rank
    Py_ssize_t n       # mode size
    Py_ssize_t rn      # trailing rank


cdef CoreMeta* _acquire(list cores) except NULL:
    # Pointers stay valid while the caller holds the core list.
    cdef Py_ssize_t d = len(cores)
    cdef CoreMeta* meta = <CoreMeta*> malloc(d * sizeof(CoreMeta))
    if meta == NULL:
        raise MemoryError
    cdef const double[:, :, ::1] mv
    cdef Py_ssize_t i
    for i in range(d):
        mv = cores[i]
        meta[i].data = &mv[0, 0, 0]
        meta[i].rp = mv.shape[0]
        meta[i].n = mv.shape[1]
        meta[i].rn = mv.shape[2]
    return meta


def eval_indices(list cores, const long long[:, ::1] idx):
    """Chain-evaluate the tensor at a batch of zero-based multi-indices."""
    cdef Py_ssize_t d = len(cores)
    cdef Py_ssize_t b = idx.shape[0]
    if idx.shape[1] != d:
        raise ValueError("index matrix width does not match core count")

    cdef CoreMeta* meta = _acquire(cores)
    cdef Py_ssize_t maxr = 1
    cdef Py_ssize_t i
    for i in range(d):
        if meta[i].rn > maxr:
            maxr = meta[i].rn

    out = np.empty(b, dtype=np.float64)
    cdef double[::1] outv = out
    cdef double* v = <double*> malloc(maxr * sizeof(double))
    cdef double* w = <double*> malloc(maxr * sizeof(double))
    cdef double* tmp
    cdef const double* g
    cdef Py_ssize_t t, r, q, rp, rn, nstride
    cdef double acc

    if v == NULL or w == NULL:
        free(v)
        free(w)
        free(meta)
        raise MemoryError

    try:
        for t in range(b):
            g = meta[0].data + idx[t, 0] * meta[0].rn
            rn = meta[0].rn
            for q in range(rn):
                v[q] = g[q]
            for i in range(1, d):
                rp = meta[i].rp
                rn = meta[i].rn
                nstride = meta[i].n * rn
                g = meta[i].data + idx[t, i] * rn
                for q in range(rn):
                    acc = 0.0
                    for r in range(rp):
                        acc += v[r] * g[r * nstride + q]
                    w[q] = acc
                tmp = v
                v = w
                w = tmp
            outv[t] = v[0]
    finally:
        free(v)
        free(w)
        free(meta)
    return out


def sweep_max(list cores, Py_ssize_t k):
    """Beam sweep over a right-orthogonal train; see ``_ref.sweep_max``."""
    cdef Py_ssize_t d = len(cores)
    if k < 1:
        raise ValueError("beam width must be >= 1")

    cdef CoreMeta* meta = _acquire(cores)
    if meta[d - 1].rn != 1:
        free(meta)
        raise ValueError("last core must have trailing rank 1")

    # Exact buffer sizes for the largest expansion encountered.
    cdef Py_ssize_t rows = meta[0].n
    cdef Py_ssize_t max_rows = rows
    cdef Py_ssize_t max_elems = rows * meta[0].rn
    cdef Py_ssize_t kcur = min(k, rows)
    cdef Py_ssize_t i, elems
    for i in range(1, d):
        rows = kcur * meta[i].n
        elems = rows * meta[i].rn
        if rows > max_rows:
            max_rows = rows
        if elems > max_elems:
            max_elems = elems
        kcur = min(k, rows)
    cdef Py_ssize_t kmax = kcur if kcur > min(k, meta[0].n) else min(k, meta[0].n)

    qa_arr = np.empty(max_elems, dtype=np.float64)
    qb_arr = np.empty(max_elems, dtype=np.float64)
    ia_arr = np.empty((kmax, d), dtype=np.int64)
    ib_arr = np.empty((kmax, d), dtype=np.int64)
    cdef double[::1] qa = qa_arr
    cdef double[::1] qb = qb_arr
    cdef long long[:, ::1] ia = ia_arr
    cdef long long[:, ::1] ib = ib_arr
    cdef NormRow* nr = <NormRow*> malloc(max_rows * sizeof(NormRow))
    if nr == NULL:
        free(meta)
        raise MemoryError

    cdef const double* g
    cdef Py_ssize_t j, r, c, n, rp, rn, m, t, src, parent
    cdef double acc, qv

    try:
        # Seed from the first core's row unfolding.
        g = meta[0].data
        rn = meta[0].rn
        rows = meta[0].n
        for j in range(rows):
            acc = 0.0
            for c in range(rn):
                acc += g[j * rn + c] * g[j * rn + c]
            nr[j].norm = acc
            nr[j].row = j
        qsort(nr, rows, sizeof(NormRow), _cmp_norm_row)
        kcur = min(k, rows)
        for t in range(kcur):
            src = nr[t].row
            ia[t, 0] = src
            for c in range(rn):
                qa[t * rn + c] = g[src * rn + c]

        for i in range(1, d):
            g = meta[i].data
            rp = meta[i].rp
            n = meta[i].n
            rn = meta[i].rn
            m = n * rn
            # Expand: qb (kcur*n, rn) row-major == qa (kcur, rp) @ unfold (rp, m).
            for j in range(kcur):
                for c in range(m):
                    qb[j * m + c] = 0.0
                for r in range(rp):
                    qv = qa[j * rp + r]
                    if qv != 0.0:
                        for c in range(m):
                            qb[j * m + c] += qv * g[r * m + c]
            rows = kcur * n
            for j in range(rows):
                acc = 0.0
                for c in range(rn):
                    acc += qb[j * rn + c] * qb[j * rn + c]
                nr[j].norm = acc
                nr[j].row = j
            qsort(nr, rows, sizeof(NormRow), _cmp_norm_row)
            kcur = min(k, rows)
            for t in range(kcur):
                src = nr[t].row
                parent = src / n
                for c in range(i):
                    ib[t, c] = ia[parent, c]
                ib[t, i] = src % n
                for c in range(rn):
                    qa[t * rn + c] = qb[src * rn + c]
            for t in range(kcur):
                for c in range(i + 1):
                    ia[t, c] = ib[t, c]
    finally:
        free(nr)
        free(meta)

    vals = np.empty(kcur, dtype=np.float64)
    cdef double[::1] valsv = vals
    for t in range(kcur):
        valsv[t] = qa[t]
    return ia_arr[:kcur].copy(), vals
