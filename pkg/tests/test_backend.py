import os
import subprocess
import sys

import numpy as np
import pytest
import scipy.sparse as sp

from antimod import _backend, _fallback
from antimod.validation import random_graph

compiled = pytest.mark.skipif(_backend.BACKEND != "compiled", reason="compiled extension not built")


def splitmix64_reference(z):
    mask = (1 << 64) - 1
    z = (z + 0x9E3779B97F4A7C15) & mask
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
    return z ^ (z >> 31)


def test_splitmix_matches_integer_reference():
    zs = [0, 1, 2**63, 2**64 - 1, 123456789]
    got = _fallback._splitmix64(np.array(zs, dtype=np.uint64))
    assert got.tolist() == [splitmix64_reference(z) for z in zs]


def test_sampler_matches_scalar_reference():
    # the pair (u, v) is kept iff the hash of key + u*n + v falls below b
    block_of = np.array([0, 0, 1, 1, 1], dtype=np.int64)
    probs = np.array([[0.7, 0.2], [0.2, 0.4]])
    seed, n = 17, 5
    key = splitmix64_reference(seed)
    want = []
    for u in range(n):
        for v in range(u + 1, n):
            h = splitmix64_reference((key + u * n + v) % 2**64)
            if (h >> 11) * 2.0**-53 < probs[block_of[u], block_of[v]]:
                want.append((u, v))
    rr, cc = _fallback.sbm_pairs(block_of, probs, seed, 0, n)
    assert list(zip(rr.tolist(), cc.tolist())) == want


@compiled
class TestEquivalence:
    def test_csr_matvec(self, rng):
        py, c = _backend.get("csr_matvec", "python"), _backend.get("csr_matvec", "compiled")
        for _ in range(50):
            g = random_graph(rng, n_max=200)
            a = g.adjacency
            x = rng.standard_normal(g.n)
            want = a @ x
            for threads in (1, 4):
                assert np.array_equal(c(a.indptr, a.indices, a.data, x, threads), want)
            assert np.array_equal(py(a.indptr, a.indices, a.data, x), want)

    def test_kmeans_assign(self, rng):
        py, c = _backend.get("kmeans_assign", "python"), _backend.get("kmeans_assign", "compiled")
        for _ in range(50):
            pts = rng.standard_normal((int(rng.integers(1, 300)), int(rng.integers(1, 6))))
            ctr = rng.standard_normal((int(rng.integers(1, 8)), pts.shape[1]))
            l1, d1 = py(pts, ctr)
            for threads in (1, 3):
                l2, d2 = c(pts, ctr, threads)
                assert np.array_equal(l1, l2) and np.array_equal(d1, d2)

    def test_kmeans_ties_pick_lowest_center(self):
        c = _backend.get("kmeans_assign", "compiled")
        pts = np.array([[0.0]])
        ctr = np.array([[1.0], [-1.0]])
        assert c(pts, ctr, 1)[0].tolist() == [0]
        assert _backend.get("kmeans_assign", "python")(pts, ctr)[0].tolist() == [0]

    def test_sbm_pairs(self, rng):
        py, c = _backend.get("sbm_pairs", "python"), _backend.get("sbm_pairs", "compiled")
        for _ in range(20):
            n = int(rng.integers(2, 300))
            k = int(rng.integers(1, 5))
            block_of = np.sort(rng.integers(0, k, size=n)).astype(np.int64)
            b = rng.random((k, k))
            b = (b + b.T) / 2
            seed = int(rng.integers(2**32))
            lo = int(rng.integers(0, n))
            hi = int(rng.integers(lo, n + 1))
            r1, c1 = py(block_of, b, seed, lo, hi)
            r2, c2 = c(block_of, b, seed, lo, hi)
            assert np.array_equal(r1, r2) and np.array_equal(c1, c2)


def test_pure_python_switch():
    code = "import antimod; print(antimod.BACKEND)"
    env = {**os.environ, "ANTIMOD_PURE_PYTHON": "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_pure_python_detect_matches(tmp_path):
    # whole pipeline gives the same report under either backend
    code = (
        "import sys, antimod\n"
        "g = antimod.sample(antimod.SbmSpec((40, 40), [[0.5, 0.05], [0.05, 0.5]]), 2)\n"
        "r = antimod.detect(g, antimod.DetectionConfig(measure='degree', restarts=5))\n"
        "sys.stdout.write(antimod.io.dumps_json(r.to_dict()))\n"
    )
    outs = []
    for flag in ("0", "1"):
        env = {**os.environ, "ANTIMOD_PURE_PYTHON": flag}
        proc = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        outs.append(proc.stdout)
    assert outs[0] == outs[1]


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("ANTIMOD_THREADS", "2")
    assert _backend.num_threads() == 2
    monkeypatch.setenv("ANTIMOD_THREADS", "bogus")
    assert _backend.num_threads() >= 1


def test_unknown_backend():
    with pytest.raises(ValueError):
        _backend.get("csr_matvec", "fortran")


def test_csr_matvec_empty_rows():
    a = sp.csr_matrix(np.array([[0.0, 0.0], [0.0, 2.0]]))
    x = np.array([1.0, 3.0])
    ip, ix = a.indptr.astype(np.int64), a.indices.astype(np.int64)
    assert _backend.csr_matvec(ip, ix, a.data, x).tolist() == [0.0, 6.0]
