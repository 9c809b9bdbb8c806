"""Eigenpairs of largest modulus for symmetric operators.

Small problems are solved densely. Larger ones go through a thick-restart
Lanczos iteration that keeps Ritz vectors from both ends of the spectrum, so
large negative eigenvalues are found alongside large positive ones.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator

from .errors import DataError, DimensionMismatch, NoConvergence, NotSymmetric, RankBoundError

DENSE_THRESHOLD = 512
DEFAULT_TOL = 1e-8

# relative gap under which two moduli count as tied
_TIE_RTOL = 1e-12


@dataclass
class SpectralSummary:
    """Eigenpairs ordered by nonincreasing modulus.

    ``frobenius_norm`` is the norm of the whole operator when it is known
    (dense path), ``None`` otherwise.
    """

    lambdas: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    converged: int
    frobenius_norm: float | None = None
    method: str = "dense"
    restarts: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return len(self.lambdas)

    def head(self, m: int) -> "SpectralSummary":
        return SpectralSummary(
            self.lambdas[:m].copy(), self.vectors[:, :m].copy(), self.residuals[:m].copy(),
            min(self.converged, m), self.frobenius_norm, self.method, self.restarts,
        )


def _shape(op) -> int:
    shape = getattr(op, "shape", None)
    if shape is None or len(shape) != 2 or shape[0] != shape[1]:
        raise DimensionMismatch(f"operator must be square, got shape {shape}")
    return int(shape[0])


def _matvec_of(op):
    if isinstance(op, np.ndarray):
        return lambda x: op @ x
    if sp.issparse(op):
        csr = sp.csr_matrix(op, dtype=np.float64)
        return lambda x: csr @ x
    if isinstance(op, LinearOperator) or hasattr(op, "matvec"):
        return op.matvec
    raise DataError(f"cannot apply object of type {type(op).__name__}")


def materialize(op) -> np.ndarray:
    """Dense copy of a matrix or linear operator."""
    if isinstance(op, np.ndarray):
        return np.array(op, dtype=np.float64)
    if sp.issparse(op):
        return op.toarray().astype(np.float64)
    if hasattr(op, "to_dense"):
        return op.to_dense()
    n = _shape(op)
    return np.asarray(op @ np.eye(n), dtype=np.float64)


def modulus_order(lambdas) -> np.ndarray:
    """Indices sorting by modulus (desc), then signed value (desc), then index."""
    lam = np.asarray(lambdas, dtype=np.float64)
    if lam.size == 0:
        return np.empty(0, dtype=np.int64)
    scale = max(float(np.abs(lam).max()), np.finfo(float).tiny)
    # snap moduli to a grid so that near-equal values tie deterministically
    snapped = np.round(np.abs(lam) / (scale * _TIE_RTOL))
    return np.lexsort((np.arange(lam.size), -lam, -snapped))


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so the entry of largest magnitude (lowest index on ties) is positive."""
    v = np.array(vectors, dtype=np.float64)
    if v.size == 0:
        return v
    piv = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[piv, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    return v * signs


def _residuals(matvec, lambdas, vectors):
    out = np.empty(len(lambdas))
    for i, lam in enumerate(lambdas):
        out[i] = np.linalg.norm(matvec(vectors[:, i]) - lam * vectors[:, i])
    return out


def check_symmetric_dense(a, rtol=1e-12):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    scale = np.abs(a).max() if a.size else 0.0
    if np.abs(a - a.T).max(initial=0.0) > rtol * scale:
        raise NotSymmetric("matrix is not symmetric")
    return a


def full_symmetric_eig(a) -> SpectralSummary:
    """Complete eigendecomposition of a dense symmetric matrix."""
    a = check_symmetric_dense(a)
    a = 0.5 * (a + a.T)
    w, v = np.linalg.eigh(a)
    order = modulus_order(w)
    w, v = w[order], fix_signs(v[:, order])
    res = np.linalg.norm(a @ v - v * w, axis=0)
    return SpectralSummary(w, v, res, len(w), float(np.linalg.norm(a)), "dense")


def singular_values(a) -> np.ndarray:
    return np.linalg.svd(np.asarray(a, dtype=np.float64), compute_uv=False)


def low_rank_truncation(a, k: int) -> np.ndarray:
    """Best rank-``k`` Frobenius approximation built from the k largest-modulus eigenpairs."""
    a = check_symmetric_dense(a)
    n = a.shape[0]
    if not 1 <= k <= n:
        raise RankBoundError(f"rank must satisfy 1 <= k <= {n}, got {k}")
    if k == n:
        return a.copy()
    s = full_symmetric_eig(a)
    u = s.vectors[:, :k]
    return (u * s.lambdas[:k]) @ u.T


def _check_operator_symmetry(matvec, n, rng):
    x = rng.standard_normal(n)
    y = rng.standard_normal(n)
    ax, ay = matvec(x), matvec(y)
    gap = abs(x @ ay - y @ ax)
    scale = np.linalg.norm(x) * np.linalg.norm(ay) + np.linalg.norm(y) * np.linalg.norm(ax)
    if gap > 1e-9 * scale:
        raise NotSymmetric(f"operator failed a symmetry probe (gap {gap:.3g})")


def dominant_eigenpairs(op, m: int, tol: float = DEFAULT_TOL, seed: int = 0,
                        method: str = "auto", dense_threshold: int = DENSE_THRESHOLD,
                        ncv: int | None = None, max_restarts: int | None = None
                        ) -> SpectralSummary:
    """The ``m`` eigenpairs of largest modulus of a symmetric operator.

    ``method`` is ``"dense"``, ``"lanczos"`` or ``"auto"`` (dense when
    ``n <= dense_threshold``). Results are deterministic for a given seed.
    """
    n = _shape(op)
    if not 1 <= m <= n:
        raise DimensionMismatch(f"m must satisfy 1 <= m <= n={n}, got {m}")
    if method == "auto":
        method = "dense" if n <= dense_threshold else "lanczos"
    if method == "dense":
        return full_symmetric_eig(materialize(op)).head(m)
    if method != "lanczos":
        raise DataError(f"unknown method {method!r}")

    matvec = _matvec_of(op)
    rng = np.random.default_rng(seed)
    _check_operator_symmetry(matvec, n, rng)
    if max_restarts is None:
        max_restarts = 50 * m
    if ncv is None:
        ncv = max(2 * m + 10, 20)
    ncv = min(ncv, n)
    lam, vec, restarts = thick_restart_lanczos(matvec, n, m, tol, rng, ncv, max_restarts)
    order = modulus_order(lam)
    lam, vec = lam[order], fix_signs(vec[:, order])
    res = _residuals(matvec, lam, vec)
    scale = max(1.0, abs(lam[0]))
    converged = int(np.count_nonzero(res <= tol * scale))
    return SpectralSummary(lam, vec, res, converged, None, "lanczos", restarts)


def thick_restart_lanczos(matvec, n, m, tol, rng, ncv, max_restarts):
    """Thick-restart Lanczos with full reorthogonalization.

    Returns the ``m`` Ritz pairs of largest modulus and the number of
    restarts used. The projected matrix ``T = V' A V`` is kept in full, which
    after a restart has the arrowhead-plus-tridiagonal shape.
    """
    V = np.zeros((n, ncv + 1))
    T = np.zeros((ncv, ncv))
    v0 = rng.standard_normal(n)
    V[:, 0] = v0 / np.linalg.norm(v0)
    start = 0
    anorm = 0.0
    beta = 0.0
    for restart in range(max_restarts + 1):
        for j in range(start, ncv):
            w = matvec(V[:, j])
            anorm = max(anorm, float(np.linalg.norm(w)))
            basis = V[:, : j + 1]
            h = basis.T @ w
            w = w - basis @ h
            h2 = basis.T @ w
            w = w - basis @ h2
            h += h2
            T[: j + 1, j] = h
            T[j, : j + 1] = h
            beta = float(np.linalg.norm(w))
            if beta <= 1e-12 * anorm or beta == 0.0:
                # invariant subspace reached: continue from a fresh direction
                beta = 0.0
                w = _fresh_direction(rng, basis)
                if w is None:
                    ncv_eff = j + 1
                    theta, Y = np.linalg.eigh(T[:ncv_eff, :ncv_eff])
                    pick = modulus_order(theta)[:m]
                    return theta[pick], basis @ Y[:, pick], restart
                V[:, j + 1] = w
            else:
                V[:, j + 1] = w / beta

        theta, Y = np.linalg.eigh(T)
        order = modulus_order(theta)
        scale = max(1.0, abs(theta[order[0]]))
        resid = np.abs(beta * Y[-1, :])
        wanted = order[:m]
        if np.all(resid[wanted] <= tol * scale) or ncv >= n:
            return theta[wanted], V[:, :ncv] @ Y[:, wanted], restart

        keep = order[: min(m + max((ncv - m) // 2, 1), ncv - 1)]
        nkeep = len(keep)
        kept = V[:, :ncv] @ Y[:, keep]
        tail = V[:, ncv].copy()
        V[:] = 0.0
        V[:, :nkeep] = kept
        V[:, nkeep] = tail
        T[:] = 0.0
        T[np.arange(nkeep), np.arange(nkeep)] = theta[keep]
        start = nkeep
    converged = int(np.count_nonzero(resid[wanted] <= tol * scale))
    raise NoConvergence(max_restarts, converged, m)


def _fresh_direction(rng, basis):
    n, j = basis.shape
    if j >= n:
        return None
    for _ in range(5):
        w = rng.standard_normal(n)
        w -= basis @ (basis.T @ w)
        w -= basis @ (basis.T @ w)
        norm = np.linalg.norm(w)
        if norm > 1e-8:
            return w / norm
    return None
