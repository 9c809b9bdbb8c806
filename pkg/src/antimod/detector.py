"""End-to-end community and anti-community detection.

The pipeline computes the dominant eigenpairs of the modularity operator,
picks the number ``k`` of separated eigenvalues from the ratios
``|lam_i| / |lam_{i+1}|``, embeds nodes with the ``k`` leading eigenvectors
and clusters the rows into ``k + 1`` groups. In ``k_plus_one`` mode the
group of smallest ``|q|`` is the background from which the modules stand
out; in ``k`` mode no background is designated. Every other cluster is
labelled by the sign of its normalized modularity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import DataError, InsufficientSpectrum, ZeroMeasure
from .graph import Graph, Partition
from .modularity import MeasurePolicy, ModularityOperator, modularity, normalized_modularity
from .spectral import DENSE_THRESHOLD, SpectralSummary, dominant_eigenpairs

COMMUNITY = "community"
ANTI_COMMUNITY = "anti-community"
BACKGROUND = "background"


@dataclass
class DetectionConfig:
    measure: MeasurePolicy = field(default_factory=MeasurePolicy)
    k: int | str = "auto"
    max_k: int = 20
    ratio_threshold: float = 1.25
    clusters: str = "k_plus_one"
    scale_rows: bool = True
    seed: int = 0
    restarts: int = 50
    tol: float = 1e-8
    dense_threshold: int = DENSE_THRESHOLD

    def __post_init__(self):
        if isinstance(self.measure, str):
            self.measure = MeasurePolicy.parse(self.measure)
        if self.k != "auto" and not (isinstance(self.k, (int, np.integer)) and self.k >= 1):
            raise DataError(f"k must be 'auto' or a positive integer, got {self.k!r}")
        if self.max_k < 1:
            raise DataError("max_k must be at least 1")
        if not self.ratio_threshold > 1:
            raise DataError("ratio_threshold must exceed 1")
        if self.clusters not in ("k_plus_one", "k"):
            raise DataError("clusters must be 'k_plus_one' or 'k'")
        if self.restarts < 1:
            raise DataError("restarts must be at least 1")


@dataclass
class ClusterInfo:
    id: int
    members: np.ndarray
    Q: float
    q: float | None
    classification: str | None

    @property
    def size(self) -> int:
        return len(self.members)

    def to_dict(self):
        return {
            "id": self.id,
            "size": self.size,
            "Q": self.Q,
            "q": self.q,
            "classification": self.classification,
            "members": [int(i) for i in self.members],
        }


@dataclass
class DetectionReport:
    k_selected: int
    ratios: np.ndarray
    eigenvalues: np.ndarray
    clusters: list
    labels: np.ndarray
    seed: int
    measure: MeasurePolicy
    clusters_mode: str
    n: int
    num_edges: int
    inertia: float
    spectrum: SpectralSummary | None = None

    def by_class(self, classification):
        return [c for c in self.clusters if c.classification == classification]

    def to_dict(self):
        return {
            "meta": {
                "n": self.n,
                "m": self.num_edges,
                "measure": str(self.measure),
                "seed": self.seed,
                "k_selected": self.k_selected,
                "clusters_mode": self.clusters_mode,
            },
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "ratios": [float(r) for r in self.ratios],
            "clusters": [c.to_dict() for c in self.clusters],
        }


def spectrum_ratios(lambdas, max_k: int | None = None, tol: float = 1e-8) -> np.ndarray:
    """Ratios ``|lam_i| / |lam_{i+1}|`` of a modulus-sorted spectrum.

    A ratio is ``inf`` when the denominator is below ``tol * |lam_1|``; when
    both terms are that small the ratio is reported as 1 (no separation).
    """
    lam = np.abs(np.asarray(lambdas, dtype=np.float64))
    if lam.size < 2:
        raise InsufficientSpectrum("need at least two eigenvalues for ratios")
    count = lam.size - 1 if max_k is None else min(max_k, lam.size - 1)
    floor = tol * lam[0]
    out = np.empty(count)
    for i in range(count):
        num, den = lam[i], lam[i + 1]
        if den <= floor:
            out[i] = 1.0 if num <= floor else math.inf
        else:
            out[i] = num / den
    return out


def select_k(ratios, cfg: DetectionConfig) -> int:
    """Explicit ``cfg.k``, or the last ratio at or above the threshold (argmax if none)."""
    if cfg.k != "auto":
        return int(cfg.k)
    r = np.asarray(ratios, dtype=np.float64)
    if r.size == 0:
        raise InsufficientSpectrum("no ratios to select from")
    r = r[: cfg.max_k]
    above = np.flatnonzero(r >= cfg.ratio_threshold)
    if above.size:
        return int(above[-1]) + 1
    return int(np.argmax(r)) + 1


def embed_nodes(spectrum: SpectralSummary, k: int, measure=None, scale_rows: bool = True) -> np.ndarray:
    """Rows of the ``k`` leading eigenvectors, each divided by ``sqrt(mu_i)`` if requested."""
    if spectrum.m < k or spectrum.converged < k:
        raise InsufficientSpectrum(f"need {k} converged eigenpairs, have {spectrum.converged}")
    emb = np.array(spectrum.vectors[:, :k], dtype=np.float64)
    if scale_rows and measure is not None:
        emb /= np.sqrt(np.asarray(measure, dtype=np.float64))[:, None]
    return emb


@dataclass
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    inertia: float
    restart: int
    inertias: np.ndarray


def _seed_centers(points, groups, rng):
    n = len(points)
    chosen = [int(rng.integers(n))]
    d2 = np.sum((points - points[chosen[0]]) ** 2, axis=1)
    for _ in range(1, groups):
        total = float(np.add.reduce(d2))
        if total > 0:
            nxt = int(rng.choice(n, p=d2 / total))
        else:
            free = np.setdiff1d(np.arange(n), chosen)
            nxt = int(rng.choice(free))
        chosen.append(nxt)
        d2 = np.minimum(d2, np.sum((points - points[nxt]) ** 2, axis=1))
    return points[chosen].copy()


def _lloyd(points, centers, max_iter):
    groups = len(centers)
    labels, d2 = _backend.kmeans_assign(points, centers)
    for _ in range(max_iter):
        counts = np.bincount(labels, minlength=groups)
        for c in np.flatnonzero(counts == 0):
            # move an empty center onto the worst-served point of a shared cluster
            counts = np.bincount(labels, minlength=groups)
            movable = counts[labels] > 1
            if not movable.any():
                break
            far = int(np.argmax(np.where(movable, d2, -1.0)))
            labels[far] = c
            d2[far] = 0.0
        sums = np.zeros_like(centers)
        np.add.at(sums, labels, points)
        counts = np.bincount(labels, minlength=groups)
        nonempty = counts > 0
        centers = centers.copy()
        centers[nonempty] = sums[nonempty] / counts[nonempty, None]
        new_labels, d2 = _backend.kmeans_assign(points, np.ascontiguousarray(centers))
        if np.array_equal(new_labels, labels):
            labels = new_labels
            break
        labels = new_labels
    return labels, centers, float(np.add.reduce(d2))


def kmeans(points, groups: int, seed: int = 0, restarts: int = 50, max_iter: int = 300) -> KMeansResult:
    """Lloyd's k-means with k-means++ seeding; best of ``restarts`` by inertia.

    Restart ``r`` draws from its own child of ``SeedSequence(seed)``, so the
    result is the same whatever order restarts run in. Ties go to the
    lowest restart index.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    n = len(points)
    if n == 0:
        raise DataError("cannot cluster an empty embedding")
    if not 1 <= groups <= n:
        raise DataError(f"groups must satisfy 1 <= groups <= n={n}, got {groups}")
    children = np.random.SeedSequence(seed).spawn(restarts)
    best = None
    inertias = np.empty(restarts)
    for r, child in enumerate(children):
        rng = np.random.default_rng(child)
        centers = _seed_centers(points, groups, rng)
        labels, centers, inertia = _lloyd(points, centers, max_iter)
        inertias[r] = inertia
        if best is None or inertia < best[2]:
            best = (labels, centers, inertia, r)
    labels, centers, inertia, r = best
    return KMeansResult(labels, centers, inertia, r, inertias)


def _canonical_labels(labels, groups):
    """Renumber clusters by their smallest member; empty clusters are dropped."""
    firsts = []
    for c in range(groups):
        idx = np.flatnonzero(labels == c)
        if idx.size:
            firsts.append((idx[0], c))
    remap = np.full(groups, -1, dtype=np.int64)
    for new, (_, old) in enumerate(sorted(firsts)):
        remap[old] = new
    return remap[labels], len(firsts)


def cluster_rows(embedding, groups: int, seed: int = 0, restarts: int = 50) -> Partition:
    res = kmeans(embedding, groups, seed, restarts)
    labels, k = _canonical_labels(res.labels, groups)
    return Partition(labels, k=k)


def classify_clusters(g: Graph, partition: Partition, policy: MeasurePolicy = MeasurePolicy(),
                      background: bool = True) -> list:
    """Modularity, normalized modularity and a label for every set of ``partition``.

    With ``background`` the set of smallest ``|q|`` is the background; the
    others are communities when ``q > 0`` and anti-communities otherwise.
    Sets of zero measure keep ``q = None`` and no label.
    """
    if not partition.covers():
        raise DataError("classification needs a partition covering every node")
    infos = []
    for i, c in enumerate(partition.sets()):
        try:
            q = normalized_modularity(g, c, policy)
        except ZeroMeasure:
            q = None
        infos.append(ClusterInfo(i, c.indices(), modularity(g, c), q, None))
    scored = [c for c in infos if c.q is not None]
    bg = min(scored, key=lambda c: (abs(c.q), c.id)) if background and scored else None
    for c in scored:
        if c is bg:
            c.classification = BACKGROUND
        else:
            c.classification = COMMUNITY if c.q > 0 else ANTI_COMMUNITY
    return infos


def detect(g: Graph, cfg: DetectionConfig | None = None) -> DetectionReport:
    cfg = cfg or DetectionConfig()
    op = ModularityOperator(g, cfg.measure)
    n = g.n
    if n < 2:
        raise DataError("detection needs at least two nodes")
    max_k = min(cfg.max_k, n - 1)
    wanted = max_k if cfg.k == "auto" else max(max_k, int(cfg.k))
    m = min(n, wanted + 1)
    spectrum = dominant_eigenpairs(op, m, tol=cfg.tol, seed=cfg.seed,
                                   dense_threshold=cfg.dense_threshold)
    ratios = spectrum_ratios(spectrum.lambdas, max_k, cfg.tol)
    k = select_k(ratios, DetectionConfig(**{**cfg.__dict__, "max_k": max_k}))
    if k > spectrum.m:
        raise InsufficientSpectrum(f"k={k} exceeds the {spectrum.m} computed eigenpairs")
    emb = embed_nodes(spectrum, k, op.measure, cfg.scale_rows)
    # k eigenvectors separate k + 1 groups in both modes; the mode only
    # decides whether one of them is set aside as background
    groups = k + 1
    if groups > n:
        raise DataError(f"cannot form {groups} clusters from {n} nodes")
    res = kmeans(emb, groups, cfg.seed, cfg.restarts)
    labels, used = _canonical_labels(res.labels, groups)
    partition = Partition(labels, k=used)
    clusters = classify_clusters(g, partition, cfg.measure, cfg.clusters == "k_plus_one")
    return DetectionReport(
        k_selected=k,
        ratios=ratios,
        eigenvalues=spectrum.lambdas.copy(),
        clusters=clusters,
        labels=labels,
        seed=cfg.seed,
        measure=cfg.measure,
        clusters_mode=cfg.clusters,
        n=n,
        num_edges=g.num_edges,
        inertia=res.inertia,
        spectrum=spectrum,
    )


def adjusted_rand_index(a, b) -> float:
    """Adjusted Rand index between two labelings of the same items."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DataError("labelings must have the same length")
    n = a.size
    if n < 2:
        return 1.0
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)

    def pairs(x):
        x = np.asarray(x, dtype=np.float64)
        return float(np.sum(x * (x - 1) / 2))

    index = pairs(table)
    rows, cols = pairs(table.sum(1)), pairs(table.sum(0))
    expected = rows * cols / (n * (n - 1) / 2)
    top = (rows + cols) / 2
    if top == expected:
        return 1.0
    return (index - expected) / (top - expected)
