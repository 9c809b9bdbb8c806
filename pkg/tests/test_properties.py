"""Hypothesis-driven checks of the algebraic identities."""
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from antimod import (
    MeasurePolicy,
    ModularityOperator,
    NodeSet,
    adjusted_rand_index,
    build_graph,
    modularity,
    normalized_modularity,
    rayleigh_quotient,
    spectrum_ratios,
    volume,
)
from antimod.io import parse_edge_list, write_edge_list

SETTINGS = settings(max_examples=150, deadline=None)


@st.composite
def graphs(draw, n_max=20):
    n = draw(st.integers(2, n_max))
    node = st.integers(0, n - 1)
    weight = st.floats(0.01, 10, allow_nan=False, allow_infinity=False)
    edges = draw(st.lists(st.tuples(node, node, weight), min_size=1, max_size=4 * n))
    return build_graph(n, edges)


@st.composite
def graph_and_set(draw):
    g = draw(graphs())
    mask = draw(st.lists(st.booleans(), min_size=g.n, max_size=g.n))
    return g, NodeSet.of(np.flatnonzero(mask), g.n)


policies = st.sampled_from([MeasurePolicy.unit(), MeasurePolicy.offset(), MeasurePolicy.offset(0.5)])


@SETTINGS
@given(graph_and_set())
def test_complement_has_same_modularity(gc):
    g, c = gc
    assert abs(modularity(g, c) - modularity(g, c.complement())) <= 1e-10 * g.total_volume


@SETTINGS
@given(graphs())
def test_whole_set_has_zero_modularity(g):
    assert abs(modularity(g, range(g.n))) <= 1e-10 * g.total_volume


@SETTINGS
@given(graph_and_set())
def test_volumes_add_up(gc):
    g, c = gc
    assert np.isclose(volume(g, c) + volume(g, c.complement()), g.total_volume, rtol=1e-12)


@SETTINGS
@given(graphs(), policies)
def test_null_vector(g, policy):
    op = ModularityOperator(g, policy)
    assert np.abs(op.matvec(np.sqrt(op.measure))).max() <= 1e-10 * max(1.0, g.degrees.max())


@SETTINGS
@given(graph_and_set(), policies)
def test_rayleigh_quotient_is_normalized_modularity(gc, policy):
    g, c = gc
    if len(c) == 0:
        return
    q = normalized_modularity(g, c, policy)
    r = rayleigh_quotient(ModularityOperator(g, policy), c)
    assert abs(q - r) <= 1e-10 * max(1.0, abs(q))


@SETTINGS
@given(graph_and_set(), policies)
def test_normalized_modularity_bounded_by_spectrum(gc, policy):
    g, c = gc
    if len(c) == 0:
        return
    lam = np.linalg.eigvalsh(ModularityOperator(g, policy).to_dense())
    q = normalized_modularity(g, c, policy)
    tol = 1e-10 * max(1.0, np.abs(lam).max())
    assert lam[0] - tol <= q <= lam[-1] + tol


@settings(max_examples=50, deadline=None)
@given(graphs(n_max=30), st.sampled_from([0, 1]))
def test_edge_list_roundtrip(tmp_path_factory, g, base):
    path = tmp_path_factory.mktemp("rt") / "g.edges"
    write_edge_list(g, path, base)
    assert parse_edge_list(path, base) == g


@SETTINGS
@given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=2, max_size=12))
def test_ratios_at_least_one(values):
    lam = np.array(sorted(values, key=lambda x: -abs(x)))
    r = spectrum_ratios(lam)
    assert np.all(r >= 1.0)


@SETTINGS
@given(st.lists(st.integers(0, 3), min_size=2, max_size=30), st.data())
def test_ari_symmetric_and_label_free(a, data):
    b = data.draw(st.lists(st.integers(0, 3), min_size=len(a), max_size=len(a)))
    a, b = np.array(a), np.array(b)
    assert np.isclose(adjusted_rand_index(a, b), adjusted_rand_index(b, a), atol=1e-12)
    relabel = np.array([2, 0, 3, 1])
    assert np.isclose(adjusted_rand_index(relabel[a], b), adjusted_rand_index(a, b), atol=1e-12)
    assert adjusted_rand_index(a, a) == 1.0
