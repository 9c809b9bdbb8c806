import numpy as np
import pytest
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, eigsh

from antimod import (
    MeasurePolicy,
    ModularityOperator,
    SbmSpec,
    average_modularity,
    dominant_eigenpairs,
    full_symmetric_eig,
    low_rank_truncation,
    sample,
    singular_values,
)
from antimod.errors import DimensionMismatch, NoConvergence, NotSymmetric, RankBoundError
from antimod.spectral import fix_signs, modulus_order
from antimod.validation import random_symmetric
from oracles import eig_by_modulus


class TestOrdering:
    def test_modulus_then_signed_then_index(self):
        lam = np.array([1.0, -3.0, 3.0, 0.5, -1.0])
        assert modulus_order(lam).tolist() == [2, 1, 0, 4, 3]

    def test_equal_values_keep_index_order(self):
        assert modulus_order([2.0, 2.0, 2.0]).tolist() == [0, 1, 2]

    def test_sign_convention(self):
        v = np.array([[0.6, -0.8], [-0.8, -0.6]])
        f = fix_signs(v)
        assert np.array_equal(f, [[-0.6, 0.8], [0.8, 0.6]])

    def test_sign_tie_uses_lowest_index(self):
        v = np.array([[-1.0], [1.0]]) / np.sqrt(2)
        assert fix_signs(v)[0, 0] > 0


class TestFullEig:
    def test_examples(self):
        assert full_symmetric_eig([[0, 1], [1, 0]]).lambdas.tolist() == [1.0, -1.0]
        assert full_symmetric_eig(np.eye(3)).lambdas.tolist() == [1.0, 1.0, 1.0]
        assert full_symmetric_eig([[2, 0], [0, -3]]).lambdas.tolist() == [-3.0, 2.0]

    def test_reconstruction(self, rng):
        for n in (1, 5, 40):
            a = random_symmetric(rng, n)
            s = full_symmetric_eig(a)
            rec = (s.vectors * s.lambdas) @ s.vectors.T
            assert np.linalg.norm(a - rec) <= 1e-10 * np.linalg.norm(a)
            assert np.abs(s.vectors.T @ s.vectors - np.eye(n)).max() <= 1e-8
            assert np.allclose(s.lambdas, eig_by_modulus(a), atol=1e-12)
            assert s.frobenius_norm == pytest.approx(np.linalg.norm(a))

    def test_not_symmetric(self):
        with pytest.raises(NotSymmetric):
            full_symmetric_eig([[0, 1], [0, 0]])
        with pytest.raises(DimensionMismatch):
            full_symmetric_eig(np.zeros((2, 3)))


class TestDominant:
    def test_diagonal(self):
        s = dominant_eigenpairs(np.diag([3.0, -5.0, 1.0]), 3)
        assert s.lambdas.tolist() == [-5.0, 3.0, 1.0]
        assert s.converged == 3

    def test_triangle(self, triangle):
        s = dominant_eigenpairs(ModularityOperator(triangle, MeasurePolicy.unit()), 3)
        assert np.allclose(s.lambdas, [-1, -1, 0], atol=1e-12)

    def test_two_block_average(self):
        m = average_modularity(SbmSpec((4, 4), [[0.8, 0.2], [0.2, 0.8]]))
        s = dominant_eigenpairs(m, 2)
        assert np.allclose(s.lambdas, [2.4, 0.0], atol=1e-12)

    def test_bad_m(self):
        with pytest.raises(DimensionMismatch):
            dominant_eigenpairs(np.eye(3), 4)
        with pytest.raises(DimensionMismatch):
            dominant_eigenpairs(np.eye(3), 0)

    def test_lanczos_matches_dense(self, rng):
        for _ in range(20):
            n = int(rng.integers(30, 201))
            a = random_symmetric(rng, n)
            m = int(rng.integers(1, 8))
            full = full_symmetric_eig(a)
            it = dominant_eigenpairs(a, m, tol=1e-8, seed=1, method="lanczos")
            assert it.method == "lanczos"
            assert np.abs(it.lambdas - full.lambdas[:m]).max() <= 1e-7 * abs(full.lambdas[0])
            assert np.all(it.residuals <= 1e-8 * max(1.0, abs(it.lambdas[0])))
            assert np.abs(it.vectors.T @ it.vectors - np.eye(m)).max() <= 1e-8

    def test_lanczos_finds_both_ends(self):
        d = np.concatenate([[-10.0, 9.0], np.linspace(-1, 1, 298)])
        s = dominant_eigenpairs(sp.diags(d), 2, method="lanczos", seed=3)
        assert np.allclose(s.lambdas, [-10.0, 9.0], atol=1e-8)

    def test_large_matrix_free_against_arpack(self):
        spec = SbmSpec((400, 400, 300), [[0.05, 0.005, 0.01], [0.005, 0.05, 0.01], [0.01, 0.01, 0.002]])
        g = sample(spec, 11)
        op = ModularityOperator(g, MeasurePolicy.degree())
        s = dominant_eigenpairs(op, 6, seed=0)
        assert s.method == "lanczos" and s.converged == 6
        w = eigsh(op, k=6, which="LM", tol=1e-12, return_eigenvectors=False)
        ref = np.array(sorted(w, key=lambda x: -abs(x)))
        assert np.allclose(s.lambdas, ref, atol=1e-7)

    def test_deterministic(self, rng):
        a = random_symmetric(rng, 150)
        s1 = dominant_eigenpairs(a, 5, seed=42, method="lanczos")
        s2 = dominant_eigenpairs(a, 5, seed=42, method="lanczos")
        assert np.array_equal(np.round(s1.lambdas, 12), np.round(s2.lambdas, 12))
        assert np.array_equal(s1.vectors, s2.vectors)

    def test_invariant_subspace_breakdown(self):
        # rank-2 operator: the Krylov space closes after two steps
        u = np.zeros((100, 2))
        u[:50, 0] = 1 / np.sqrt(50)
        u[50:, 1] = 1 / np.sqrt(50)
        a = (u * [4.0, -2.0]) @ u.T
        s = dominant_eigenpairs(a, 3, method="lanczos", seed=0)
        assert np.allclose(s.lambdas, [4.0, -2.0, 0.0], atol=1e-10)

    def test_no_convergence(self, rng):
        a = np.diag(np.linspace(1, 2, 400))
        with pytest.raises(NoConvergence) as info:
            dominant_eigenpairs(a, 5, tol=1e-14, method="lanczos", ncv=12, max_restarts=1)
        assert info.value.iterations == 1

    def test_asymmetric_operator_probe(self):
        a = np.triu(np.ones((600, 600)))
        op = LinearOperator((600, 600), matvec=lambda x: a @ x, dtype=float)
        with pytest.raises(NotSymmetric):
            dominant_eigenpairs(op, 2)


class TestOracles:
    def test_singular_values(self, triangle):
        assert np.allclose(singular_values([[0, 1], [1, 0]]), [1.0, 1.0], atol=1e-15)
        assert np.allclose(singular_values(np.diag([-3.0, 2.0])), [3.0, 2.0], atol=1e-15)
        m = ModularityOperator(triangle, MeasurePolicy.unit()).to_dense()
        assert np.allclose(singular_values(m), [1, 1, 0], atol=1e-12)

    def test_low_rank(self, rng, triangle):
        a = random_symmetric(rng, 6)
        assert np.array_equal(low_rank_truncation(a, 6), a)
        assert np.allclose(low_rank_truncation(np.diag([5.0, 1.0]), 1), np.diag([5.0, 0.0]), atol=1e-15)
        m = ModularityOperator(triangle, MeasurePolicy.unit()).to_dense()
        assert np.allclose(low_rank_truncation(m, 2), m, atol=1e-12)
        with pytest.raises(RankBoundError):
            low_rank_truncation(a, 0)
        with pytest.raises(RankBoundError):
            low_rank_truncation(a, 7)

    def test_truncation_error_is_tail(self, rng):
        for _ in range(50):
            n = int(rng.integers(2, 20))
            a = random_symmetric(rng, n)
            k = int(rng.integers(1, n + 1))
            lam = eig_by_modulus(a)
            err = np.linalg.norm(a - low_rank_truncation(a, k)) ** 2
            assert err == pytest.approx(np.sum(lam[k:] ** 2), rel=1e-10, abs=1e-12)

    def test_hoffman_wielandt(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 26))
            a, b = random_symmetric(rng, n), random_symmetric(rng, n)
            lhs = np.sum((singular_values(a) - singular_values(b)) ** 2)
            assert lhs <= np.linalg.norm(a - b) ** 2 + 1e-9

    def test_eckart_young(self, rng):
        for _ in range(50):
            n = int(rng.integers(2, 20))
            a = random_symmetric(rng, n)
            k = int(rng.integers(1, n))
            best = np.linalg.norm(a - low_rank_truncation(a, k))
            for _ in range(20):
                y = rng.standard_normal((n, k))
                cand = (y * rng.standard_normal(k)) @ y.T
                assert best <= np.linalg.norm(a - cand) + 1e-9
