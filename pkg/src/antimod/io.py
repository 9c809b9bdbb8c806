"""Reading graphs and partitions, writing reports."""
from __future__ import annotations

import csv
import json
import math
import re
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import DataError, ParseError, UnsupportedFormat
from .graph import Graph, _assemble

_HEADER_N = re.compile(r"^[#%]\s*n\s*=\s*(\d+)\s*$")


def parse_edge_list(path, base: int = 1) -> Graph:
    """Read ``i j [w]`` lines.

    Lines starting with ``#`` or ``%`` are comments, except a ``# n=<N>``
    header which fixes the node count. Missing weights are 1; repeated pairs,
    in either orientation, are summed.
    """
    if base not in (0, 1):
        raise DataError(f"base must be 0 or 1, got {base}")
    n_header = None
    rows, cols, ws = [], [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s:
                continue
            if s[0] in "#%":
                m = _HEADER_N.match(s)
                if m:
                    n_header = int(m.group(1))
                continue
            parts = s.split()
            if len(parts) not in (2, 3):
                raise ParseError(f"expected 'i j [w]', got {s!r}", lineno, path)
            try:
                i, j = int(parts[0]), int(parts[1])
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise ParseError(f"malformed edge {s!r}", lineno, path) from None
            if i < base or j < base:
                raise ParseError(f"node index below base {base} in {s!r}", lineno, path)
            if not (w > 0 and math.isfinite(w)):
                raise ParseError(f"nonpositive weight in {s!r}", lineno, path)
            rows.append(min(i, j) - base)
            cols.append(max(i, j) - base)
            ws.append(w)
    n = max(max(cols, default=-1) + 1, 0)
    if n_header is not None:
        if n_header < n:
            raise ParseError(f"header n={n_header} but index {n - 1 + base} appears", None, path)
        n = n_header
    if n == 0:
        raise ParseError("no nodes found", None, path)
    return _assemble(n, np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64),
                     np.array(ws, dtype=np.float64))


def write_edge_list(g: Graph, path, base: int = 1):
    """Write each undirected edge once, with a ``# n=`` header so isolated nodes survive."""
    i, j, w = g.edges()
    with open(path, "w") as fh:
        fh.write(f"# n={g.n}\n")
        for a, b, x in zip(i.tolist(), j.tolist(), w.tolist()):
            fh.write(f"{a + base} {b + base} {x!r}\n")


def parse_matrix_market(path, binarize: bool = False) -> Graph:
    """Read a coordinate MatrixMarket file as an undirected graph.

    ``general`` matrices become ``(A + A') / 2``; ``binarize`` then sets every
    stored weight to 1. ``pattern`` entries have weight 1.
    """
    with open(path) as fh:
        header = fh.readline()
        tokens = header.strip().split()
        if len(tokens) != 5 or tokens[0].lower() != "%%matrixmarket" or tokens[1].lower() != "matrix":
            raise UnsupportedFormat(f"not a MatrixMarket matrix header: {header.strip()!r}", 1, path)
        layout, field, symmetry = (t.lower() for t in tokens[2:])
        if layout != "coordinate":
            raise UnsupportedFormat(f"only coordinate layout is supported, got {layout!r}", 1, path)
        if field not in ("real", "integer", "pattern"):
            raise UnsupportedFormat(f"unsupported field {field!r}", 1, path)
        if symmetry not in ("symmetric", "general"):
            raise UnsupportedFormat(f"unsupported symmetry {symmetry!r}", 1, path)
        lineno = 1
        size = None
        for line in fh:
            lineno += 1
            s = line.strip()
            if s and not s.startswith("%"):
                size = s.split()
                break
        if size is None or len(size) != 3:
            raise ParseError("missing size line", lineno, path)
        nr, nc, nnz = (int(t) for t in size)
        if nr != nc:
            raise DataError(f"{path}: matrix is {nr}x{nc}, not square")
        rows, cols, vals = [], [], []
        for line in fh:
            lineno += 1
            s = line.strip()
            if not s or s.startswith("%"):
                continue
            parts = s.split()
            want = 2 if field == "pattern" else 3
            if len(parts) != want:
                raise ParseError(f"expected {want} fields, got {s!r}", lineno, path)
            try:
                i, j = int(parts[0]) - 1, int(parts[1]) - 1
                v = 1.0 if field == "pattern" else float(parts[2])
            except ValueError:
                raise ParseError(f"malformed entry {s!r}", lineno, path) from None
            if not (0 <= i < nr and 0 <= j < nc):
                raise ParseError(f"entry ({i + 1}, {j + 1}) out of range", lineno, path)
            rows.append(i)
            cols.append(j)
            vals.append(v)
    if len(rows) != nnz:
        raise ParseError(f"header announces {nnz} entries, found {len(rows)}", None, path)
    a = sp.coo_matrix((vals, (rows, cols)), shape=(nr, nc)).tocsr()
    if symmetry == "symmetric":
        s = a + sp.triu(a, 1).T + sp.tril(a, -1).T
    else:
        s = (a + a.T) * 0.5
    s = sp.csr_matrix(s)
    s.eliminate_zeros()
    if s.nnz and s.data.min() < 0:
        raise DataError(f"{path}: negative edge weights are not supported")
    if binarize:
        s.data[:] = 1.0
    return Graph.from_adjacency(s)


def read_graph(path, fmt: str = "auto", base: int = 1, binarize: bool = False) -> Graph:
    """Read an edge list or MatrixMarket file; ``auto`` sniffs the first line."""
    if fmt == "auto":
        with open(path) as fh:
            first = fh.readline()
        fmt = "mtx" if first.lower().startswith("%%matrixmarket") else "edges"
    if fmt == "mtx":
        return parse_matrix_market(path, binarize)
    if fmt == "edges":
        g = parse_edge_list(path, base)
        if binarize:
            adj = g.adjacency.copy()
            adj.data = np.ones_like(adj.data)
            g = Graph.from_adjacency(adj)
        return g
    raise DataError(f"unknown graph format {fmt!r}")


def read_partition(path, n: int | None = None) -> np.ndarray:
    """One integer label per line in node order; ``-1`` leaves a node unassigned."""
    labels = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s[0] in "#%":
                continue
            try:
                labels.append(int(s))
            except ValueError:
                raise ParseError(f"label must be an integer, got {s!r}", lineno, path) from None
    if n is not None and len(labels) != n:
        raise DataError(f"{path}: {len(labels)} labels for {n} nodes")
    return np.array(labels, dtype=np.int64)


def write_partition(labels, path):
    with open(path, "w") as fh:
        for lab in np.asarray(labels).tolist():
            fh.write(f"{lab}\n")


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.generic):
        return _json_safe(obj.item())
    return obj


def dumps_json(obj) -> str:
    """JSON with non-finite floats spelled as strings; floats keep 17 significant digits."""
    return json.dumps(_json_safe(obj), indent=2, sort_keys=False) + "\n"


def write_report(report, path):
    Path(path).write_text(dumps_json(report.to_dict()))


def write_spectrum_csv(path, lambdas, ratios):
    """Columns ``index, eigenvalue, abs_lambda, ratio``; the ratio is blank where undefined."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["index", "eigenvalue", "abs_lambda", "ratio"])
        for i, lam in enumerate(lambdas):
            r = repr(float(ratios[i])) if i < len(ratios) else ""
            out.writerow([i + 1, repr(float(lam)), repr(abs(float(lam))), r])
