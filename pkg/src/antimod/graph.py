"""Undirected weighted graphs, node sets and partitions."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from . import _backend
from .errors import DataError, DimensionMismatch, EmptyGraph


class Graph:
    """Immutable undirected graph stored as a symmetric CSR adjacency matrix.

    A self-loop ``(i, i, w)`` contributes ``w`` to ``a_ii`` and ``w`` to the
    degree ``d_i``, so ``d = A 1`` holds literally. Build instances with
    :func:`build_graph` or :meth:`Graph.from_adjacency`.
    """

    __slots__ = ("_adj", "_degrees", "_volume")

    def __init__(self, adjacency: sp.csr_matrix):
        adj = adjacency
        adj.indptr = adj.indptr.astype(np.int64, copy=False)
        adj.indices = adj.indices.astype(np.int64, copy=False)
        adj.data = adj.data.astype(np.float64, copy=False)
        for arr in (adj.indptr, adj.indices, adj.data):
            arr.setflags(write=False)
        self._adj = adj
        deg = np.asarray(adj.sum(axis=1), dtype=np.float64).ravel()
        deg.setflags(write=False)
        self._degrees = deg
        self._volume = float(np.add.reduce(deg))

    @classmethod
    def from_adjacency(cls, matrix) -> "Graph":
        """Wrap a symmetric nonnegative matrix (dense or sparse)."""
        a = sp.csr_matrix(matrix, dtype=np.float64)
        if a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"adjacency must be square, got {a.shape}")
        if a.shape[0] == 0:
            raise DataError("graph must have at least one node")
        a.sum_duplicates()
        a.eliminate_zeros()
        a.sort_indices()
        if a.nnz and (a.data.min() <= 0 or not np.all(np.isfinite(a.data))):
            raise DataError("edge weights must be positive and finite")
        if (a != a.T).nnz:
            raise DataError("adjacency matrix is not symmetric")
        return cls(a)

    @property
    def n(self) -> int:
        return self._adj.shape[0]

    @property
    def adjacency(self) -> sp.csr_matrix:
        return self._adj

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    @property
    def total_volume(self) -> float:
        return self._volume

    @property
    def num_edges(self) -> int:
        """Number of undirected edges, self-loops included."""
        diag = int(np.count_nonzero(self._adj.diagonal()))
        return (self._adj.nnz - diag) // 2 + diag

    def weight(self, i: int, j: int) -> float:
        return float(self._adj[i, j])

    def edges(self):
        """Undirected edges as arrays ``(i, j, w)`` with ``i <= j``, sorted."""
        coo = sp.triu(self._adj, format="coo")
        order = np.lexsort((coo.col, coo.row))
        return coo.row[order].astype(np.int64), coo.col[order].astype(np.int64), coo.data[order]

    def matvec(self, x) -> np.ndarray:
        x = np.ascontiguousarray(x, dtype=np.float64)
        if x.shape != (self.n,):
            raise DimensionMismatch(f"expected vector of length {self.n}, got {x.shape}")
        a = self._adj
        return _backend.csr_matvec(a.indptr, a.indices, a.data, x)

    def to_dense(self) -> np.ndarray:
        return self._adj.toarray()

    def permute(self, perm) -> "Graph":
        """Relabel nodes: node ``i`` of the result is node ``perm[i]`` of self."""
        perm = np.asarray(perm, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(self.n)):
            raise DataError("perm must be a permutation of range(n)")
        return Graph(sp.csr_matrix(self._adj[perm][:, perm]))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        if self.n != other.n or self._adj.nnz != other._adj.nnz:
            return False
        return (
            np.array_equal(self._adj.indptr, other._adj.indptr)
            and np.array_equal(self._adj.indices, other._adj.indices)
            and np.array_equal(self._adj.data, other._adj.data)
        )

    __hash__ = None

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.num_edges}, volume={self._volume:g})"


def build_graph(n: int, edges: Iterable) -> Graph:
    """Build a graph on nodes ``0..n-1`` from ``(i, j, w)`` triples.

    Each triple is one undirected edge; repeated pairs, in either
    orientation, have their weights summed. Pairs given as ``(i, j)`` get
    weight 1.
    """
    if int(n) != n or n < 1:
        raise DataError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    rows, cols, ws = [], [], []
    for e in edges:
        if len(e) == 2:
            i, j = e
            w = 1.0
        elif len(e) == 3:
            i, j, w = e
        else:
            raise DataError(f"edge must be (i, j) or (i, j, w), got {e!r}")
        if int(i) != i or int(j) != j:
            raise DataError(f"node indices must be integers, got ({i!r}, {j!r})")
        i, j, w = int(i), int(j), float(w)
        if not (0 <= i < n and 0 <= j < n):
            raise DataError(f"edge ({i}, {j}) out of range for n={n}")
        if not (w > 0 and np.isfinite(w)):
            raise DataError(f"edge ({i}, {j}) has nonpositive weight {w}")
        rows.append(min(i, j))
        cols.append(max(i, j))
        ws.append(w)
    return _assemble(n, np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64),
                     np.array(ws, dtype=np.float64))


def _assemble(n, rows, cols, ws):
    # sort by (row, col, weight) so duplicate sums do not depend on input order
    order = np.lexsort((ws, cols, rows))
    rows, cols, ws = rows[order], cols[order], ws[order]
    if len(rows):
        first = np.ones(len(rows), dtype=bool)
        first[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
        starts = np.flatnonzero(first)
        ws = np.add.reduceat(ws, starts)
        rows, cols = rows[starts], cols[starts]
    off = rows != cols
    r = np.concatenate([rows, cols[off]])
    c = np.concatenate([cols, rows[off]])
    w = np.concatenate([ws, ws[off]])
    adj = sp.csr_matrix((w, (r, c)), shape=(n, n))
    adj.sort_indices()
    return Graph(adj)


@dataclass(frozen=True)
class NodeSet:
    """A subset of ``{0, ..., n-1}``."""

    members: frozenset
    n: int

    def __post_init__(self):
        members = frozenset(int(i) for i in self.members)
        bad = [i for i in members if not 0 <= i < self.n]
        if bad:
            raise DataError(f"node set members {sorted(bad)[:5]} outside [0, {self.n})")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, members, n: int) -> "NodeSet":
        return cls(frozenset(members), n)

    def complement(self) -> "NodeSet":
        return NodeSet(frozenset(range(self.n)) - self.members, self.n)

    def indices(self) -> np.ndarray:
        return np.array(sorted(self.members), dtype=np.int64)

    def indicator(self) -> np.ndarray:
        return characteristic_vector(self, self.n)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    def __contains__(self, i):
        return i in self.members


def as_indices(c, n: int) -> np.ndarray:
    """Coerce a NodeSet, boolean mask or index collection to sorted indices."""
    if isinstance(c, NodeSet):
        if c.n != n:
            raise DimensionMismatch(f"node set is over {c.n} nodes, graph has {n}")
        return c.indices()
    arr = np.asarray(list(c) if isinstance(c, (set, frozenset)) else c)
    if arr.dtype == bool:
        if arr.shape != (n,):
            raise DimensionMismatch(f"mask must have length {n}")
        return np.flatnonzero(arr)
    arr = np.unique(arr.astype(np.int64)) if arr.size else np.empty(0, dtype=np.int64)
    if arr.size and (arr[0] < 0 or arr[-1] >= n):
        raise DataError(f"node indices outside [0, {n})")
    return arr


def characteristic_vector(c, n: int) -> np.ndarray:
    x = np.zeros(n)
    x[as_indices(c, n)] = 1.0
    return x


def volume(g: Graph, c) -> float:
    """Sum of the degrees of the nodes in ``c``."""
    idx = as_indices(c, g.n)
    return float(np.add.reduce(g.degrees[idx])) if idx.size else 0.0


class Partition:
    """Disjoint node sets given as per-node labels; ``-1`` marks unassigned nodes."""

    UNASSIGNED = -1

    def __init__(self, labels, k: int | None = None):
        labels = np.asarray(labels, dtype=np.int64).copy()
        if labels.ndim != 1 or labels.size == 0:
            raise DataError("labels must be a nonempty 1-d sequence")
        if (labels < -1).any():
            raise DataError("labels must be >= -1")
        top = int(labels.max()) + 1 if (labels >= 0).any() else 0
        if k is None:
            k = top
        if top > k:
            raise DataError(f"label {top - 1} exceeds k={k}")
        labels.setflags(write=False)
        self.labels = labels
        self.k = int(k)

    @classmethod
    def from_sets(cls, sets, n: int) -> "Partition":
        labels = np.full(n, -1, dtype=np.int64)
        for lab, c in enumerate(sets):
            idx = as_indices(c, n)
            if (labels[idx] >= 0).any():
                raise DataError("sets of a partition must be pairwise disjoint")
            labels[idx] = lab
        return cls(labels, k=len(sets))

    @property
    def n(self) -> int:
        return len(self.labels)

    def sets(self) -> list[NodeSet]:
        return [NodeSet(frozenset(np.flatnonzero(self.labels == i).tolist()), self.n)
                for i in range(self.k)]

    def members(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.labels == i)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels[self.labels >= 0], minlength=self.k)

    def covers(self) -> bool:
        return bool((self.labels >= 0).all())

    def reorder(self, order) -> "Partition":
        """Partition whose set ``i`` is set ``order[i]`` of self."""
        remap = np.full(self.k + 1, -1, dtype=np.int64)
        for new, old in enumerate(order):
            remap[old] = new
        return Partition(np.where(self.labels >= 0, remap[self.labels], -1), k=len(order))

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.labels, other.labels)

    __hash__ = None

    def __repr__(self):
        return f"Partition(n={self.n}, k={self.k}, sizes={self.sizes().tolist()})"


def require_volume(g: Graph):
    if not g.total_volume > 0:
        raise EmptyGraph("graph has zero total volume")
