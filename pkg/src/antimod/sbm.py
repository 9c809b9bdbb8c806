"""Stochastic block model: expected matrices, their k-by-k reductions, and sampling.

Blocks are consecutive index ranges. With block sizes ``n_i`` and
connectivity ``B``, the expected degree of a node in block ``i`` is
``delta_i = sum_j b_ij n_j`` and ``nu = sum_ij b_ij n_i n_j``. The expected
modularity matrix is block-constant with blocks ``b_ij - delta_i delta_j / nu``
and shares its nonzero eigenvalues with the k-by-k matrix
``N (B - delta delta' / nu) N`` where ``N = diag(sqrt(n_i))``.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from . import _backend
from .errors import (
    DataError,
    DimensionMismatch,
    NonConformal,
    ParseError,
    ProbabilityOutOfRange,
    ZeroDelta,
    ZeroNu,
)
from .graph import Graph


@dataclass(frozen=True)
class SbmSpec:
    """Block sizes and a symmetric connectivity matrix.

    Entries of ``b`` must be probabilities unless ``average_weight`` is set,
    in which case ``b`` holds expected edge weights and sampling is disabled.
    """

    sizes: tuple
    b: np.ndarray
    average_weight: bool = False

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise DataError(f"block sizes must be positive, got {sizes}")
        b = np.array(self.b, dtype=np.float64)
        if b.shape != (len(sizes), len(sizes)):
            raise DimensionMismatch(f"B must be {len(sizes)}x{len(sizes)}, got {b.shape}")
        if not np.array_equal(b, b.T):
            raise DataError("connectivity matrix must be symmetric")
        if not np.all(np.isfinite(b)) or (b < 0).any():
            raise DataError("connectivity entries must be finite and nonnegative")
        if not self.average_weight and (b > 1).any():
            raise ProbabilityOutOfRange("entries of B exceed 1; set average_weight for weights")
        b.setflags(write=False)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "b", b)

    @property
    def k(self) -> int:
        return len(self.sizes)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def labels(self) -> np.ndarray:
        """Planted block of every node."""
        return np.repeat(np.arange(self.k), self.sizes)

    @property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.sizes)])

    @classmethod
    def from_text(cls, text: str, average_weight: bool | None = None) -> "SbmSpec":
        """Parse ``sizes: n_1 ... n_k`` followed by the k rows of B."""
        lines = [(no, ln.strip()) for no, ln in enumerate(text.splitlines(), 1)]
        lines = [(no, ln) for no, ln in lines if ln and not ln.startswith("#")]
        if not lines or not lines[0][1].startswith("sizes:"):
            raise ParseError("first line must be 'sizes: n_1 ... n_k'", lines[0][0] if lines else 1)
        no, head = lines[0]
        try:
            sizes = [int(t) for t in head[len("sizes:"):].split()]
        except ValueError:
            raise ParseError("block sizes must be integers", no) from None
        k = len(sizes)
        if len(lines) - 1 != k:
            raise ParseError(f"expected {k} rows of B, found {len(lines) - 1}", no)
        rows = []
        for no, ln in lines[1:]:
            try:
                row = [float(t) for t in ln.split()]
            except ValueError:
                raise ParseError("B entries must be decimals", no) from None
            if len(row) != k:
                raise ParseError(f"row of B has {len(row)} entries, expected {k}", no)
            rows.append(row)
        b = np.array(rows)
        if average_weight is None:
            average_weight = bool((b > 1).any())
        return cls(tuple(sizes), b, average_weight)

    def to_text(self) -> str:
        out = ["sizes: " + " ".join(str(s) for s in self.sizes)]
        out += [" ".join(repr(float(v)) for v in row) for row in self.b]
        return "\n".join(out) + "\n"

    @classmethod
    def load(cls, path) -> "SbmSpec":
        try:
            return cls.from_text(Path(path).read_text())
        except ParseError as exc:
            raise ParseError(str(exc), path=path) from None

    def save(self, path):
        Path(path).write_text(self.to_text())


@dataclass
class SbmAverages:
    delta: np.ndarray
    nu: float
    reduced: np.ndarray
    reduced_normalized: np.ndarray | None
    normalized: bool = False

    @property
    def matrix(self) -> np.ndarray:
        """The reduced matrix matching the requested normalization."""
        return self.reduced_normalized if self.normalized else self.reduced

    def eigenpairs(self):
        """Eigenpairs of the reduced matrix, largest modulus first."""
        from .spectral import full_symmetric_eig

        s = full_symmetric_eig(self.matrix)
        return s.lambdas, s.vectors


def _conformal(sizes, n):
    sizes = np.asarray(sizes, dtype=np.int64)
    if (sizes < 1).any() or sizes.sum() != n:
        raise NonConformal(f"block sizes {sizes.tolist()} do not partition dimension {n}")
    return np.repeat(np.arange(len(sizes)), sizes)


def inflation(b, blocks, sizes) -> np.ndarray:
    """Scale block ``(i, j)`` of ``blocks`` by ``b[i, j]``."""
    b = np.asarray(b, dtype=np.float64)
    a = np.asarray(blocks, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonConformal(f"blocks must be square, got {a.shape}")
    lab = _conformal(sizes, a.shape[0])
    if b.shape != (len(sizes), len(sizes)):
        raise NonConformal(f"b must be {len(sizes)}x{len(sizes)}, got {b.shape}")
    return b[np.ix_(lab, lab)] * a


def inflation_vec(v, w, sizes) -> np.ndarray:
    """Scale sub-vector ``j`` of ``w`` by ``v[j]``."""
    v = np.asarray(v, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    lab = _conformal(sizes, w.shape[0])
    if v.shape != (len(sizes),):
        raise NonConformal(f"v must have {len(sizes)} entries, got {v.shape}")
    return v[lab] * w


def _delta_nu(spec: SbmSpec):
    n = np.asarray(spec.sizes, dtype=np.float64)
    delta = spec.b @ n
    nu = float(delta @ n)
    if not nu > 0:
        raise ZeroNu("the model has no expected edges (nu = 0)")
    return delta, nu


def average_adjacency(spec: SbmSpec) -> np.ndarray:
    lab = spec.labels
    return spec.b[np.ix_(lab, lab)].copy()


def _block_modularity(spec: SbmSpec, normalized: bool) -> np.ndarray:
    delta, nu = _delta_nu(spec)
    z = spec.b - np.outer(delta, delta) / nu
    if normalized:
        if (delta <= 0).any():
            raise ZeroDelta("a block has zero expected degree")
        s = 1.0 / np.sqrt(delta)
        z = z * np.outer(s, s)
    return z


def average_modularity(spec: SbmSpec, normalized: bool = False) -> np.ndarray:
    """Expected modularity matrix; with ``normalized`` it is scaled by expected degrees."""
    z = _block_modularity(spec, normalized)
    lab = spec.labels
    return z[np.ix_(lab, lab)]


def reduced_modularity(spec: SbmSpec, normalized: bool = False) -> SbmAverages:
    delta, nu = _delta_nu(spec)
    root = np.sqrt(np.asarray(spec.sizes, dtype=np.float64))
    red = _block_modularity(spec, False) * np.outer(root, root)
    red_norm = None
    if (delta > 0).all():
        red_norm = _block_modularity(spec, True) * np.outer(root, root)
    elif normalized:
        raise ZeroDelta("a block has zero expected degree")
    return SbmAverages(delta, nu, red, red_norm, normalized)


def lift_eigenvector(v, spec: SbmSpec) -> np.ndarray:
    """Block-constant vector whose block ``j`` equals ``v[j] / sqrt(n_j)``."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (spec.k,):
        raise DimensionMismatch(f"v must have {spec.k} entries, got {v.shape}")
    root = np.sqrt(np.asarray(spec.sizes, dtype=np.float64))
    return (v / root)[spec.labels]


def sample(spec: SbmSpec, seed: int) -> Graph:
    """Draw a simple undirected graph: each pair ``u < v`` is an edge independently.

    Every pair has its own counter-based random stream keyed by ``seed``, so
    the result does not depend on how the work is split.
    """
    if spec.average_weight:
        raise ProbabilityOutOfRange("sampling needs probabilities, not average weights")
    n = spec.n
    block_of = np.ascontiguousarray(spec.labels, dtype=np.int64)
    probs = np.ascontiguousarray(spec.b, dtype=np.float64)
    key = int(seed) & 0xFFFFFFFFFFFFFFFF
    rows, cols = _backend.sbm_pairs(block_of, probs, key, 0, n)
    r = np.concatenate([rows, cols])
    c = np.concatenate([cols, rows])
    adj = sp.csr_matrix((np.ones(len(r)), (r, c)), shape=(n, n))
    adj.sort_indices()
    return Graph(adj)


def shuffle_nodes(g: Graph, labels, seed: int):
    """Randomly relabel nodes; returns the shuffled graph, labels and permutation."""
    perm = np.random.default_rng(seed).permutation(g.n)
    return g.permute(perm), np.asarray(labels)[perm], perm
