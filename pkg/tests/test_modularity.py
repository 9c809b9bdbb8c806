from fractions import Fraction

import numpy as np
import pytest

from antimod import (
    MeasurePolicy,
    ModularityOperator,
    NodeSet,
    apply_modularity,
    build_graph,
    measure_vector,
    modularity,
    normalized_modularity,
    rayleigh_quotient,
)
from antimod.errors import DataError, EmptyGraph, ZeroMeasure
from antimod.validation import random_graph, random_partition, random_policy
from oracles import dense_modularity_matrix, exact_modularity

UNIT, DEGREE = MeasurePolicy.unit(), MeasurePolicy.degree()


class TestPolicy:
    def test_parse(self):
        assert MeasurePolicy.parse("unit") == UNIT
        assert MeasurePolicy.parse("offset:2.5") == MeasurePolicy.offset(2.5)
        assert MeasurePolicy.parse("offset").tau is None
        with pytest.raises(DataError):
            MeasurePolicy.parse("degree:1")
        with pytest.raises(DataError):
            MeasurePolicy("volume")
        with pytest.raises(DataError):
            MeasurePolicy.offset(-1)

    def test_offset_default_is_average_degree(self, k22):
        # mu(C) = tau |C| + vol(C)
        p = MeasurePolicy.offset()
        assert p.resolved_tau(k22) == 2.0
        assert np.array_equal(p.weights(k22), [4.0] * 4)

    def test_str_roundtrip(self):
        for p in (UNIT, DEGREE, MeasurePolicy.offset(), MeasurePolicy.offset(0.75)):
            assert MeasurePolicy.parse(str(p)) == p


class TestModularity:
    def test_triangle_pair(self, triangle):
        # 2 - 16/6
        expected = -2 / 3
        assert exact_modularity(triangle.to_dense(), [0, 1]) == Fraction(-2, 3)
        assert modularity(triangle, {0, 1}) == pytest.approx(expected, rel=1e-14)

    def test_whole_set_is_zero(self, triangle, k22):
        assert modularity(triangle, range(3)) == pytest.approx(0, abs=1e-14)
        assert modularity(k22, range(4)) == pytest.approx(0, abs=1e-14)

    def test_bipartite_side(self, k22):
        assert modularity(k22, {0, 1}) == pytest.approx(-k22.total_volume / 4, rel=1e-14)
        assert modularity(k22, {0, 1}) == pytest.approx(-2.0, rel=1e-14)

    def test_empty_graph(self):
        with pytest.raises(EmptyGraph):
            modularity(build_graph(3, []), {0})

    def test_matches_exact_oracle(self, rng):
        for _ in range(100):
            g = random_graph(rng, n_max=15)
            c = random_partition(rng, g.n).sets()[0]
            want = float(exact_modularity(g.to_dense(), sorted(c.members)))
            assert modularity(g, c) == pytest.approx(want, rel=1e-10, abs=1e-10 * g.total_volume)

    def test_complement_symmetry(self, rng):
        for _ in range(500):
            g = random_graph(rng)
            c = random_partition(rng, g.n).sets()[0]
            assert abs(modularity(g, c) - modularity(g, c.complement())) <= 1e-10 * g.total_volume


class TestNormalized:
    def test_examples(self, triangle, k22):
        assert normalized_modularity(triangle, {0, 1}, UNIT) == pytest.approx(-1 / 3, rel=1e-14)
        assert normalized_modularity(k22, {0, 1}, DEGREE) == pytest.approx(-0.5, rel=1e-14)
        for p in (UNIT, DEGREE, MeasurePolicy.offset()):
            assert normalized_modularity(k22, range(4), p) == pytest.approx(0, abs=1e-14)

    def test_zero_measure(self):
        g = build_graph(3, [(0, 1, 1.0)])
        with pytest.raises(ZeroMeasure):
            normalized_modularity(g, {2}, DEGREE)
        with pytest.raises(ZeroMeasure):
            normalized_modularity(g, set(), UNIT)


class TestMeasureVector:
    def test_unit(self):
        g = build_graph(3, [(0, 1, 1.0), (1, 2, 1.0)])
        assert np.allclose(measure_vector({0, 1}, UNIT, g), np.array([1, 1, 0]) / np.sqrt(2), atol=1e-15)
        assert np.array_equal(measure_vector({0}, UNIT, g), [1.0, 0.0, 0.0])

    def test_degree(self, k22):
        x = measure_vector({0, 1}, DEGREE, k22)
        assert np.allclose(x, np.array([np.sqrt(2), np.sqrt(2), 0, 0]) / 2, atol=1e-15)
        assert np.linalg.norm(x) == pytest.approx(1.0, abs=1e-15)

    def test_zero_measure(self):
        g = build_graph(3, [(0, 1, 1.0)])
        with pytest.raises(ZeroMeasure):
            measure_vector({2}, DEGREE, g)


class TestOperator:
    def test_triangle_columns(self, triangle):
        op = ModularityOperator(triangle, UNIT)
        assert np.allclose(apply_modularity(op, np.ones(3)), 0, atol=1e-15)
        # M = J/3 - I for the triangle
        assert np.allclose(apply_modularity(op, [1, 0, 0]), [-2 / 3, 1 / 3, 1 / 3], atol=1e-15)
        assert np.array_equal(apply_modularity(op, np.zeros(3)), np.zeros(3))

    def test_rejects_isolated_node_under_degree(self):
        g = build_graph(3, [(0, 1, 1.0)])
        with pytest.raises(ZeroMeasure):
            ModularityOperator(g, DEGREE)
        ModularityOperator(g, MeasurePolicy.offset())

    def test_rejects_empty_graph(self):
        with pytest.raises(EmptyGraph):
            ModularityOperator(build_graph(2, []), UNIT)

    def test_dense_oracle(self, rng):
        for _ in range(100):
            g = random_graph(rng, n_max=30)
            p = random_policy(rng)
            op = ModularityOperator(g, p)
            dense = dense_modularity_matrix(g.to_dense(), p.weights(g))
            x = rng.standard_normal(g.n)
            want = dense @ x
            assert np.abs(op.matvec(x) - want).max() <= 1e-12 * max(1.0, np.abs(want).max())
            assert np.allclose(op.to_dense(), dense, rtol=0, atol=1e-12 * np.abs(dense).max())
            x2 = rng.standard_normal((g.n, 3))
            assert np.allclose(op.matmat(x2), dense @ x2, atol=1e-12 * max(1.0, np.abs(dense).max()))

    def test_frobenius_norm_closed_form(self, rng):
        for _ in range(50):
            g = random_graph(rng, n_max=40)
            op = ModularityOperator(g, random_policy(rng))
            assert op.frobenius_norm() == pytest.approx(np.linalg.norm(op.to_dense()), rel=1e-10)

    def test_null_vector(self, rng):
        for _ in range(200):
            g = random_graph(rng)
            op = ModularityOperator(g, random_policy(rng))
            r = op.matvec(np.sqrt(op.measure))
            assert np.abs(r).max() <= 1e-10 * max(1.0, g.degrees.max())

    def test_rayleigh_matches_normalized(self, rng, triangle, k22):
        assert rayleigh_quotient(ModularityOperator(triangle, UNIT), {0, 1}) == pytest.approx(-1 / 3, rel=1e-12)
        assert rayleigh_quotient(ModularityOperator(k22, DEGREE), {0, 1}) == pytest.approx(-0.5, rel=1e-12)
        assert rayleigh_quotient(ModularityOperator(k22, UNIT), range(4)) == pytest.approx(0, abs=1e-14)
        for _ in range(300):
            g = random_graph(rng)
            p = random_policy(rng)
            c = random_partition(rng, g.n).sets()[0]
            q = normalized_modularity(g, c, p)
            assert rayleigh_quotient(ModularityOperator(g, p), c) == pytest.approx(q, rel=1e-10, abs=1e-12)

    def test_unit_policy_is_plain_modularity_matrix(self, rng):
        g = random_graph(rng, n_max=20)
        op = ModularityOperator(g, UNIT)
        a = g.to_dense()
        d = a.sum(axis=1)
        x = rng.standard_normal(g.n)
        assert np.allclose(op.matvec(x), (a - np.outer(d, d) / d.sum()) @ x, atol=1e-12)

    def test_is_symmetric(self, rng):
        g = random_graph(rng, n_max=30)
        op = ModularityOperator(g, DEGREE)
        x, y = rng.standard_normal(g.n), rng.standard_normal(g.n)
        assert x @ op.matvec(y) == pytest.approx(y @ op.matvec(x), rel=1e-12)
        assert op.adjoint() is op


def test_nodeset_on_wrong_graph(triangle):
    with pytest.raises(DataError):
        modularity(triangle, NodeSet.of({0}, 5))
