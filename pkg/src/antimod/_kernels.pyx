# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops.

Every routine here has a numpy twin in :mod:`antimod._fallback` with the same
signature; :mod:`antimod._backend` picks one at import time.
"""
import numpy as np

cimport numpy as cnp
from cython.parallel cimport prange
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()

# below this many stored entries a parallel region costs more than it saves
cdef int64_t _PARALLEL_NNZ = 200000


cdef inline uint64_t _splitmix64(uint64_t z) noexcept nogil:
    z = z + <uint64_t>0x9E3779B97F4A7C15ULL
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return z ^ (z >> 31)


def csr_matvec(const int64_t[::1] indptr, const int64_t[::1] indices,
               const double[::1] data, const double[::1] x, int nthreads=1):
    """y = A x for a CSR matrix. Each row is reduced serially, left to right."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t i
    cdef int64_t p
    cdef double acc
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] y = out
    if nthreads > 1 and indptr[n] >= _PARALLEL_NNZ:
        for i in prange(n, nogil=True, schedule="static", num_threads=nthreads):
            acc = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                acc = acc + data[p] * x[indices[p]]
            y[i] = acc
    else:
        with nogil:
            for i in range(n):
                acc = 0.0
                for p in range(indptr[i], indptr[i + 1]):
                    acc = acc + data[p] * x[indices[p]]
                y[i] = acc
    return out


def kmeans_assign(const double[:, ::1] points, const double[:, ::1] centers,
                  int nthreads=1):
    """Nearest center per point (lowest index on ties) and its squared distance."""
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t dim = points.shape[1]
    cdef Py_ssize_t k = centers.shape[0]
    cdef Py_ssize_t i, c, f
    cdef double best, acc, diff
    cdef int64_t arg
    labels_arr = np.empty(n, dtype=np.int64)
    dist_arr = np.empty(n, dtype=np.float64)
    cdef int64_t[::1] labels = labels_arr
    cdef double[::1] dist = dist_arr
    cdef int threads = nthreads if n * k * dim >= _PARALLEL_NNZ else 1
    for i in prange(n, nogil=True, schedule="static", num_threads=threads):
        best = -1.0
        arg = 0
        for c in range(k):
            acc = 0.0
            for f in range(dim):
                diff = points[i, f] - centers[c, f]
                acc = acc + diff * diff
            if best < 0.0 or acc < best:
                best = acc
                arg = c
        labels[i] = arg
        dist[i] = best
    return labels_arr, dist_arr


cdef inline bint _pair_hit(uint64_t key, uint64_t idx, double p) noexcept nogil:
    cdef uint64_t h = _splitmix64(key + idx)
    return (<double>(h >> 11)) * 1.1102230246251565e-16 < p


def sbm_pairs(const int64_t[::1] block_of, const double[:, ::1] probs,
              uint64_t seed, Py_ssize_t row_start, Py_ssize_t row_end):
    """Edges u < v with u in [row_start, row_end) of a block-model draw.

    Pair (u, v) is kept when the counter-based uniform for index ``u * n + v``
    falls below ``probs[block_of[u], block_of[v]]``; the outcome of a pair
    never depends on how rows are chunked.
    """
    cdef Py_ssize_t n = block_of.shape[0]
    cdef uint64_t key = _splitmix64(seed)
    cdef Py_ssize_t u, v
    cdef int64_t count = 0, pos = 0
    cdef int64_t bu
    with nogil:
        for u in range(row_start, row_end):
            bu = block_of[u]
            for v in range(u + 1, n):
                if _pair_hit(key, <uint64_t>(u * n + v), probs[bu, block_of[v]]):
                    count += 1
    rows_arr = np.empty(count, dtype=np.int64)
    cols_arr = np.empty(count, dtype=np.int64)
    cdef int64_t[::1] rows = rows_arr
    cdef int64_t[::1] cols = cols_arr
    with nogil:
        for u in range(row_start, row_end):
            bu = block_of[u]
            for v in range(u + 1, n):
                if _pair_hit(key, <uint64_t>(u * n + v), probs[bu, block_of[v]]):
                    rows[pos] = u
                    cols[pos] = v
                    pos += 1
    return rows_arr, cols_arr
