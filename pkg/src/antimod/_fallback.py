"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""
import numpy as np
import scipy.sparse as sp

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.1102230246251565e-16

# rows handled per vectorized chunk in sbm_pairs, bounds peak memory
_PAIR_CHUNK = 1 << 22


def _splitmix64(z):
    z = z + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MUL1
    z = (z ^ (z >> np.uint64(27))) * _MUL2
    return z ^ (z >> np.uint64(31))


def csr_matvec(indptr, indices, data, x, nthreads=1):
    n = len(indptr) - 1
    a = sp.csr_matrix((data, indices, indptr), shape=(n, len(x)))
    return a @ np.asarray(x, dtype=np.float64)


def kmeans_assign(points, centers, nthreads=1):
    # accumulate feature by feature, in the same order as the compiled loop
    dist = np.zeros((len(points), len(centers)))
    for f in range(points.shape[1]):
        diff = points[:, f, None] - centers[None, :, f]
        dist += diff * diff
    labels = np.argmin(dist, axis=1).astype(np.int64)
    return labels, dist[np.arange(len(points)), labels]


def sbm_pairs(block_of, probs, seed, row_start, row_end):
    n = len(block_of)
    with np.errstate(over="ignore"):
        key = _splitmix64(np.array([seed], dtype=np.uint64))[0]
    rows_out, cols_out = [], []
    u = row_start
    while u < row_end:
        # grow the chunk until it holds about _PAIR_CHUNK pairs
        stop = u + 1
        pairs = n - u - 1
        while stop < row_end and pairs + (n - stop - 1) <= _PAIR_CHUNK:
            pairs += n - stop - 1
            stop += 1
        us = np.arange(u, stop, dtype=np.int64)
        counts = n - us - 1
        rr = np.repeat(us, counts)
        # column offsets restart at u + 1 for every row
        starts = np.cumsum(counts) - counts
        cc = np.arange(len(rr), dtype=np.int64) - np.repeat(starts, counts) + rr + 1
        idx = (rr * n + cc).astype(np.uint64)
        with np.errstate(over="ignore"):
            h = _splitmix64(key + idx)
        unif = (h >> np.uint64(11)).astype(np.float64) * _INV_2_53
        hit = unif < probs[block_of[rr], block_of[cc]]
        rows_out.append(rr[hit])
        cols_out.append(cc[hit])
        u = stop
    if not rows_out:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    return np.concatenate(rows_out), np.concatenate(cols_out)
