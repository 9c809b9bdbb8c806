"""Kernel selection.

The compiled extension is used when it imports; setting ``ANTIMOD_PURE_PYTHON=1``
forces the numpy fallback. ``ANTIMOD_THREADS`` caps the OpenMP thread count.
"""
import os

from . import _fallback

try:
    if os.environ.get("ANTIMOD_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from . import _kernels as _impl

    BACKEND = "compiled"
except ImportError:
    _impl = _fallback
    BACKEND = "python"


def num_threads():
    raw = os.environ.get("ANTIMOD_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def get(name, backend=None):
    """Return kernel ``name`` from the active backend, or from ``backend``."""
    if backend is None:
        return getattr(_impl, name)
    if backend == "python":
        return getattr(_fallback, name)
    if backend == "compiled":
        from . import _kernels

        return getattr(_kernels, name)
    raise ValueError(f"unknown backend {backend!r}")


def csr_matvec(indptr, indices, data, x):
    return _impl.csr_matvec(indptr, indices, data, x, num_threads())


def kmeans_assign(points, centers):
    return _impl.kmeans_assign(points, centers, num_threads())


def sbm_pairs(block_of, probs, seed, row_start, row_end):
    return _impl.sbm_pairs(block_of, probs, seed, row_start, row_end)
