"""Modularity of node sets and the generalized modularity operator."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator

from .errors import DataError, DimensionMismatch, ZeroMeasure
from .graph import Graph, as_indices, require_volume


@dataclass(frozen=True)
class MeasurePolicy:
    """Vertex measure ``mu``: ``unit`` (1), ``degree`` (d_i) or ``offset`` (tau + d_i).

    For ``offset`` a ``tau`` of ``None`` means the average degree of the graph
    the policy is applied to.
    """

    kind: str = "unit"
    tau: float | None = None

    def __post_init__(self):
        if self.kind not in ("unit", "degree", "offset"):
            raise DataError(f"unknown measure kind {self.kind!r}")
        if self.kind != "offset" and self.tau is not None:
            raise DataError("tau only applies to the offset measure")
        if self.tau is not None and not (self.tau >= 0 and np.isfinite(self.tau)):
            raise DataError(f"tau must be a nonnegative real, got {self.tau!r}")

    @classmethod
    def unit(cls):
        return cls("unit")

    @classmethod
    def degree(cls):
        return cls("degree")

    @classmethod
    def offset(cls, tau=None):
        return cls("offset", None if tau is None else float(tau))

    @classmethod
    def parse(cls, text: str) -> "MeasurePolicy":
        """Parse ``unit``, ``degree``, ``offset`` or ``offset:<tau>``."""
        kind, _, tau = text.strip().partition(":")
        if kind == "offset":
            return cls.offset(float(tau) if tau else None)
        if tau:
            raise DataError(f"measure {kind!r} takes no parameter")
        return cls(kind)

    def resolved_tau(self, g: Graph) -> float | None:
        if self.kind != "offset":
            return None
        return g.total_volume / g.n if self.tau is None else self.tau

    def weights(self, g: Graph) -> np.ndarray:
        if self.kind == "unit":
            return np.ones(g.n)
        if self.kind == "degree":
            return np.array(g.degrees, dtype=np.float64)
        return self.resolved_tau(g) + g.degrees

    def __str__(self):
        if self.kind == "offset" and self.tau is not None:
            return f"offset:{self.tau!r}"
        return self.kind


def _internal_weight(g: Graph, idx: np.ndarray) -> float:
    if idx.size == 0:
        return 0.0
    return float(g.adjacency[idx][:, idx].sum())


def modularity(g: Graph, c) -> float:
    """Newman-Girvan modularity ``1_C' A 1_C - vol(C)^2 / vol(V)``."""
    require_volume(g)
    idx = as_indices(c, g.n)
    vol_c = float(np.add.reduce(g.degrees[idx])) if idx.size else 0.0
    return _internal_weight(g, idx) - vol_c * vol_c / g.total_volume


def set_measure(g: Graph, c, policy: MeasurePolicy) -> float:
    idx = as_indices(c, g.n)
    if idx.size == 0:
        return 0.0
    return float(np.add.reduce(policy.weights(g)[idx]))


def normalized_modularity(g: Graph, c, policy: MeasurePolicy = MeasurePolicy()) -> float:
    """Modularity divided by the measure of the set."""
    mu = set_measure(g, c, policy)
    if not mu > 0:
        raise ZeroMeasure(f"node set has zero measure under the {policy} policy")
    return modularity(g, c) / mu


def measure_vector(c, policy: MeasurePolicy, g: Graph) -> np.ndarray:
    """Unit vector proportional to ``W^{1/2} 1_C``; its support is exactly ``C``."""
    idx = as_indices(c, g.n)
    w = policy.weights(g)
    x = np.zeros(g.n)
    x[idx] = np.sqrt(w[idx])
    norm = np.linalg.norm(x)
    if not norm > 0:
        raise ZeroMeasure(f"node set has zero measure under the {policy} policy")
    return x / norm


def measure_frame(g: Graph, sets, policy: MeasurePolicy) -> np.ndarray:
    """Stack the measure vectors of disjoint sets as columns."""
    return np.column_stack([measure_vector(c, policy, g) for c in sets])


class ModularityOperator(LinearOperator):
    """Matrix-free ``M = W^{-1/2} (A - d d'/vol(V)) W^{-1/2}``.

    Applying it costs one sparse product with ``A`` plus O(n) work. The
    operator is symmetric and immutable, so concurrent use is safe.
    """

    def __init__(self, graph: Graph, policy: MeasurePolicy = MeasurePolicy()):
        require_volume(graph)
        mu = policy.weights(graph)
        zero = np.flatnonzero(~(mu > 0))
        if zero.size:
            raise ZeroMeasure(
                f"{zero.size} node(s) have zero measure under the {policy} policy "
                f"(first: {zero[0]}); use the unit or offset measure"
            )
        self.graph = graph
        self.policy = policy
        self.measure = mu
        self.measure.setflags(write=False)
        self.degrees = graph.degrees
        self.volume = graph.total_volume
        self.inv_sqrt_measure = 1.0 / np.sqrt(mu)
        self.inv_sqrt_measure.setflags(write=False)
        super().__init__(dtype=np.float64, shape=(graph.n, graph.n))

    @property
    def n(self) -> int:
        return self.shape[0]

    def _matvec(self, x):
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        if x.shape[0] != self.n:
            raise DimensionMismatch(f"expected vector of length {self.n}, got {x.shape[0]}")
        y = x * self.inv_sqrt_measure
        # pairwise summation keeps d'y independent of BLAS threading
        dy = np.add.reduce(self.degrees * y)
        z = self.graph.matvec(y) - self.degrees * (dy / self.volume)
        return z * self.inv_sqrt_measure

    def _matmat(self, x):
        x = np.asarray(x, dtype=np.float64)
        y = x * self.inv_sqrt_measure[:, None]
        z = self.graph.adjacency @ y - np.outer(self.degrees, self.degrees @ y) / self.volume
        return z * self.inv_sqrt_measure[:, None]

    def _adjoint(self):
        return self

    def frobenius_norm(self) -> float:
        """``||M||_F`` from the sparse adjacency, without forming ``M``.

        With ``B = W^{-1/2} A W^{-1/2}`` and ``f = W^{-1/2} d``,
        ``||M||_F^2 = ||B||_F^2 - 2 f'Bf / vol + (f'f)^2 / vol^2``.
        """
        a = self.graph.adjacency.tocoo()
        s = self.inv_sqrt_measure
        b = a.data * s[a.row] * s[a.col]
        f = self.degrees * s
        bf = self.graph.matvec(f * s) * s
        vol = self.volume
        sq = float(np.dot(b, b)) - 2.0 * float(f @ bf) / vol + float(f @ f) ** 2 / vol ** 2
        return float(np.sqrt(max(sq, 0.0)))

    def to_dense(self) -> np.ndarray:
        """Materialize the operator; intended for small graphs and tests."""
        d = self.degrees
        dense = self.graph.to_dense() - np.outer(d, d) / self.volume
        return dense * np.outer(self.inv_sqrt_measure, self.inv_sqrt_measure)


def apply_modularity(op: ModularityOperator, x) -> np.ndarray:
    return op.matvec(np.asarray(x, dtype=np.float64))


def rayleigh_quotient(op: ModularityOperator, c) -> float:
    """``chi_C' M chi_C``, which equals the normalized modularity of ``C``."""
    chi = measure_vector(c, op.policy, op.graph)
    return float(chi @ op.matvec(chi))
