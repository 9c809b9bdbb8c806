"""Frobenius projections onto the matrix spaces H(X) and K(X), matrix angles,
and numerical checks of the eigenvalue and eigenspace inequalities that tie
a family of node sets to the dominant spectrum of the modularity operator.

For an orthonormal frame ``X = [x_1, ..., x_k]``:

* ``H(X)`` is the span of ``x_i x_i'``; the projection of ``A`` onto it is
  ``sum_i tau_i x_i x_i'`` with ``tau_i = x_i' A x_i``.
* ``K(X)`` is ``{X S X' : S symmetric}``; the projection is ``X X' A X X'``.

The cosine of the angle between ``A`` and a space is the Frobenius norm of
the projection divided by that of ``A``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    InsufficientSpectrum,
    NotOrthonormal,
    ZeroLeadingEigenvalue,
    ZeroMatrix,
)
from .graph import Graph, Partition
from .modularity import MeasurePolicy, ModularityOperator, measure_frame, normalized_modularity
from .spectral import DENSE_THRESHOLD, SpectralSummary, _shape, full_symmetric_eig, materialize

# above this cosine, 1 - cos^2 loses too many digits and the residual is used
_SINE_DIRECT_ABOVE = 0.999


def frobenius_inner(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.sum(a * b))


@dataclass(frozen=True)
class OrthonormalFrame:
    columns: np.ndarray

    def __post_init__(self):
        x = np.array(self.columns, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, None]
        n, k = x.shape
        if not 1 <= k <= n:
            raise DimensionMismatch(f"frame must have 1 <= k <= n columns, got {k} for n={n}")
        err = np.linalg.norm(x.T @ x - np.eye(k))
        if err > 1e-8:
            raise NotOrthonormal(f"columns are not orthonormal (||X'X - I||_F = {err:.3g})")
        x.setflags(write=False)
        object.__setattr__(self, "columns", x)

    @property
    def n(self):
        return self.columns.shape[0]

    @property
    def k(self):
        return self.columns.shape[1]


def _frame(x) -> np.ndarray:
    if isinstance(x, OrthonormalFrame):
        return x.columns
    return OrthonormalFrame(x).columns


@dataclass
class ProjectionResult:
    """Projection of a symmetric matrix onto ``H(X)`` (``kind="H"``) or ``K(X)``.

    ``coefficients`` holds the ``tau_i`` for H and the k-by-k ``S = X'AX``
    for K.
    """

    kind: str
    coefficients: np.ndarray
    cosine: float
    sine: float
    projection_norm: float
    frobenius_norm: float

    @property
    def taus(self):
        if self.kind != "H":
            raise AttributeError("taus only exist for H projections")
        return self.coefficients

    @property
    def S(self):
        if self.kind != "K":
            raise AttributeError("S only exists for K projections")
        return self.coefficients

    def projection(self, x) -> np.ndarray:
        x = _frame(x)
        if self.kind == "H":
            return (x * self.coefficients) @ x.T
        return x @ self.coefficients @ x.T


def _dense_or_none(op, dense_threshold):
    if isinstance(op, np.ndarray):
        return np.asarray(op, dtype=np.float64)
    if _shape(op) <= dense_threshold:
        return materialize(op)
    return None


def _project(kind, op, x, fro_norm, dense_threshold):
    x = _frame(x)
    n = _shape(op)
    if x.shape[0] != n:
        raise DimensionMismatch(f"frame has {x.shape[0]} rows, operator has dimension {n}")
    dense = _dense_or_none(op, dense_threshold)
    ax = dense @ x if dense is not None else np.column_stack([op.matvec(c) for c in x.T])
    if kind == "H":
        coef = np.einsum("ij,ij->j", x, ax)
        pnorm = float(np.linalg.norm(coef))
    else:
        coef = x.T @ ax
        coef = 0.5 * (coef + coef.T)
        pnorm = float(np.linalg.norm(coef))
    if fro_norm is None:
        if dense is None:
            raise InsufficientSpectrum(
                "Frobenius norm of a large matrix-free operator must be supplied"
            )
        fro_norm = float(np.linalg.norm(dense))
    if not fro_norm > 0:
        raise ZeroMatrix("cannot measure angles against the zero matrix")
    cos = min(1.0, pnorm / fro_norm)
    if cos > _SINE_DIRECT_ABOVE and dense is not None:
        p = (x * coef) @ x.T if kind == "H" else x @ coef @ x.T
        sin = min(1.0, float(np.linalg.norm(dense - p)) / fro_norm)
    else:
        sin = float(np.sqrt(max(0.0, 1.0 - cos * cos)))
    return ProjectionResult(kind, coef, cos, sin, cos * fro_norm, fro_norm)


def project_H(op, x, fro_norm=None, dense_threshold=DENSE_THRESHOLD) -> ProjectionResult:
    """Project ``op`` onto ``H(X)``; ``fro_norm`` is required for large matrix-free operators."""
    return _project("H", op, x, fro_norm, dense_threshold)


def project_K(op, x, fro_norm=None, dense_threshold=DENSE_THRESHOLD) -> ProjectionResult:
    """Project ``op`` onto ``K(X)``."""
    return _project("K", op, x, fro_norm, dense_threshold)


def sigma_score(g: Graph, partition: Partition, policy: MeasurePolicy = MeasurePolicy()) -> float:
    """Sum of squared normalized modularities of the sets of ``partition``."""
    return float(sum(normalized_modularity(g, c, policy) ** 2 for c in partition.sets()))


def procrustes(target, x):
    """Orthogonal ``Z`` minimizing ``||target - X Z||_F``, and that minimum."""
    p, _, qt = np.linalg.svd(x.T @ target)
    z = p @ qt
    return z, float(np.linalg.norm(target - x @ z))


@dataclass
class BoundRecord:
    name: str
    statement: str
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


@dataclass
class BoundReport:
    """Inequalities evaluated on one instance; ``slack = rhs - lhs`` is never clamped."""

    records: list
    cosine: float
    sine: float
    k: int
    q: np.ndarray
    lambdas: np.ndarray
    extra: dict = field(default_factory=dict)

    def __getitem__(self, name) -> BoundRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def min_slack(self) -> float:
        return min(r.slack for r in self.records)

    def holds(self, atol: float = 1e-9) -> bool:
        return self.min_slack >= -atol


def _full_norm(spectrum, dense, n, dense_threshold):
    if spectrum is not None and spectrum.frobenius_norm is not None:
        return spectrum.frobenius_norm
    if spectrum is not None and spectrum.m == n:
        return float(np.sqrt(np.sum(spectrum.lambdas ** 2)))
    if dense is not None:
        return float(np.linalg.norm(dense))
    raise InsufficientSpectrum(
        f"n={n} exceeds the dense threshold {dense_threshold} and the spectrum "
        "does not carry the full Frobenius norm"
    )


def _prepare(op, x, spectrum, k_needed, dense_threshold):
    x = _frame(x)
    n = _shape(op)
    dense = _dense_or_none(op, dense_threshold)
    if spectrum is None:
        if dense is None:
            raise InsufficientSpectrum("a spectrum is required for large operators")
        spectrum = full_symmetric_eig(dense)
    if spectrum.m < k_needed or spectrum.converged < k_needed:
        raise InsufficientSpectrum(
            f"need {k_needed} converged eigenpairs, spectrum has {spectrum.converged}"
        )
    fro = _full_norm(spectrum, dense, n, dense_threshold)
    return x, dense if dense is not None else op, spectrum, fro


def eigenvalue_bounds_frame(op, x, spectrum=None, dense_threshold=DENSE_THRESHOLD,
                            interval_atol=1e-9) -> BoundReport:
    """Eigenvalue inequalities for an arbitrary orthonormal frame.

    The ``q`` values are the Rayleigh quotients ``x_i' A x_i``, sorted by
    decreasing modulus. Two records are produced:

    * ``dominance``: ``sum_{i<=k} lam_i^2 >= c^2 ||A||_F^2 + sum_i (|lam_i| - |q_i|)^2``
    * ``deviation``: ``sum_i (|lam_i| - |q_i|)^2 <= s^2 sum_{i<=k} lam_i^2``

    ``extra["interval_index"]`` lists the indices with
    ``1 - s <= q_i / lam_i <= 1 + s``.
    """
    x = _frame(x)
    k = x.shape[1]
    x, a, spectrum, fro = _prepare(op, x, spectrum, k, dense_threshold)
    proj = project_H(a, x, fro_norm=fro, dense_threshold=dense_threshold)
    q = proj.taus[np.argsort(-np.abs(proj.taus), kind="stable")]
    lam = spectrum.lambdas[:k]
    c, s = proj.cosine, proj.sine
    top = float(np.sum(lam ** 2))
    dev = float(np.sum((np.abs(lam) - np.abs(q)) ** 2))
    records = [
        BoundRecord("dominance", "sum_{i<=k} lam_i^2 >= c^2 sum lam_i^2 + sum (|lam_i|-|q_i|)^2",
                    c * c * fro * fro + dev, top),
        BoundRecord("deviation", "sum (|lam_i|-|q_i|)^2 <= s^2 sum_{i<=k} lam_i^2",
                    dev, s * s * top),
    ]
    hits = []
    for i in range(k):
        if lam[i] != 0:
            ratio = q[i] / lam[i]
            if 1 - s - interval_atol <= ratio <= 1 + s + interval_atol:
                hits.append(i)
    extra = {"interval_index": hits, "interval_holds": bool(hits), "frobenius_norm": fro}
    return BoundReport(records, c, s, k, q, lam.copy(), extra)


def eigenspace_bounds_frame(op, x, spectrum=None, dense_threshold=DENSE_THRESHOLD,
                            zero_tol=1e-8) -> BoundReport:
    """Eigenspace inequalities for an arbitrary orthonormal frame.

    With ``U1`` the k leading eigenvectors and ``X_perp`` an orthonormal
    completion of ``X``:

    * ``subspace``: ``||U1' X_perp||_F^2 <= (s^2 ||A||_F^2 - sum_i ||A x_i - q_i x_i||^2) / lam_k^2``
    * ``procrustes``: ``min_Z ||U1 - X Z||_F <= sqrt(2) ||A||_F s / |lam_k|``
    """
    x = _frame(x)
    k = x.shape[1]
    x, a, spectrum, fro = _prepare(op, x, spectrum, k, dense_threshold)
    lam_k = float(spectrum.lambdas[k - 1])
    if abs(lam_k) <= zero_tol:
        raise ZeroLeadingEigenvalue(f"|lambda_{k}| = {abs(lam_k):.3g} is numerically zero")
    proj = project_H(a, x, fro_norm=fro, dense_threshold=dense_threshold)
    s = proj.sine
    u1 = spectrum.vectors[:, :k]
    # ||U1' X_perp||_F = ||(I - X X') U1||_F, no completion needed
    lhs1 = float(np.linalg.norm(u1 - x @ (x.T @ u1)) ** 2)
    ax = a @ x if isinstance(a, np.ndarray) else np.column_stack([a.matvec(c) for c in x.T])
    resid = float(np.sum((ax - x * proj.taus) ** 2))
    rhs1 = (s * s * fro * fro - resid) / lam_k ** 2
    z, dist = procrustes(u1, x)
    rhs2 = np.sqrt(2.0) * fro * s / abs(lam_k)
    records = [
        BoundRecord("subspace", "||U1' X_perp||_F^2 <= (s^2||A||_F^2 - sum ||A x_i - q_i x_i||^2)/lam_k^2",
                    lhs1, rhs1),
        BoundRecord("procrustes", "min_Z ||U1 - X Z||_F <= sqrt(2) ||A||_F s / |lam_k|",
                    dist, rhs2),
    ]
    extra = {"aligner": z, "residual_sum": resid, "frobenius_norm": fro}
    return BoundReport(records, proj.cosine, s, k, proj.taus.copy(),
                       spectrum.lambdas[:k].copy(), extra)


def _partition_frame(op: ModularityOperator, partition: Partition):
    g, policy = op.graph, op.policy
    sets = partition.sets()
    q = np.array([normalized_modularity(g, c, policy) for c in sets])
    order = np.argsort(-np.abs(q), kind="stable")
    return measure_frame(g, [sets[i] for i in order], policy)


def eigenvalue_bounds(op: ModularityOperator, partition: Partition,
                      spectrum: SpectralSummary | None = None,
                      dense_threshold=DENSE_THRESHOLD) -> BoundReport:
    """Eigenvalue inequalities for the measure vectors of ``partition``."""
    x = _partition_frame(op, partition)
    return eigenvalue_bounds_frame(op, x, spectrum, dense_threshold)


def eigenspace_bounds(op: ModularityOperator, partition: Partition,
                      spectrum: SpectralSummary | None = None,
                      dense_threshold=DENSE_THRESHOLD, zero_tol=1e-8) -> BoundReport:
    """Eigenspace inequalities for the measure vectors of ``partition``."""
    x = _partition_frame(op, partition)
    return eigenspace_bounds_frame(op, x, spectrum, dense_threshold, zero_tol)
