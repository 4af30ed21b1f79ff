import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wickgraph.errors import GuardError, ValidationError
from wickgraph.graph import (
    Multigraph,
    canonical_key,
    components,
    enumerate_graphs,
    graph_from_key,
    graph_sum,
)

LOOP = Multigraph.from_matrix([[1]])
EDGE = Multigraph.from_edges(2, [(0, 1)])
DOUBLE = Multigraph.from_edges(2, [(0, 1), (0, 1)])
TWO_LOOPS = Multigraph.from_edges(2, [(0, 0), (1, 1)])
LOOP_V = Multigraph.from_edges(2, [(0, 0)])
LOOP_W = Multigraph.from_edges(2, [(1, 1)])
TRIANGLE = Multigraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


def test_degree_examples():
    assert LOOP.degree(0) == 2
    assert EDGE.degrees() == (1, 1)
    assert TRIANGLE.degrees() == (2, 2, 2)


def test_degree_out_of_range():
    with pytest.raises(ValidationError):
        EDGE.degree(2)


def test_sum_examples():
    assert LOOP_V + LOOP_W == TWO_LOOPS
    assert EDGE + Multigraph.zero(2) == EDGE
    assert EDGE + EDGE == DOUBLE
    with pytest.raises(ValidationError):
        EDGE + LOOP


def test_components_examples():
    assert len(components(TWO_LOOPS)) == 2
    assert len(components(DOUBLE)) == 1
    zero = components(Multigraph.zero(3))
    assert [c.vertices for c in zero] == [(0,), (1,), (2,)]
    assert all(c.graph.edge_count() == 0 for c in zero)


def test_components_induced_graphs():
    g = Multigraph.from_edges(4, [(0, 2), (0, 2), (1, 1), (3, 3)])
    comps = components(g)
    assert [c.vertices for c in comps] == [(0, 2), (1,), (3,)]
    assert comps[0].graph == DOUBLE
    assert comps[1].graph == LOOP


def test_enumerate_examples():
    assert len(enumerate_graphs(3, (2, 2, 2))) == 5
    assert enumerate_graphs(2, (1, 1)) == [EDGE]
    assert set(enumerate_graphs(2, (2, 2))) == {DOUBLE, TWO_LOOPS}
    assert enumerate_graphs(2, (1, 2)) == []


def test_enumerate_order_is_lexicographic():
    gs = enumerate_graphs(3, (2, 2, 2))
    flat = [tuple(v for r in g.upper for v in r) for g in gs]
    assert flat == sorted(flat)


def test_enumerate_zero_degrees():
    assert enumerate_graphs(3, (0, 0, 0)) == [Multigraph.zero(3)]


def test_enumerate_matches_brute_force():
    # every upper-triangular matrix with entries <= 3 on 3 vertices, filtered by degree
    n = 3
    cells = [(i, j) for i in range(n) for j in range(i, n)]
    by_degree = {}
    for values in itertools.product(range(4), repeat=len(cells)):
        adj = [[0] * n for _ in range(n)]
        for (i, j), v in zip(cells, values):
            adj[i][j] = v
        g = Multigraph.from_matrix(adj)
        by_degree.setdefault(g.degrees(), set()).add(g)
    for degs in [(2, 2, 2), (1, 2, 3), (4, 2, 2), (3, 3, 0), (2, 0, 2)]:
        expected = {g for g in by_degree.get(degs, set())}
        assert set(enumerate_graphs(n, degs)) == expected


def test_canonical_key_examples():
    assert canonical_key(LOOP_V.induced([0])) == canonical_key(LOOP_W.induced([1]))
    assert canonical_key(DOUBLE) != canonical_key(TWO_LOOPS)
    p1 = Multigraph.from_edges(3, [(0, 1), (1, 2)])
    p2 = Multigraph.from_edges(3, [(1, 0), (0, 2)])
    assert canonical_key(p1) == canonical_key(p2)


def test_canonical_key_round_trip_and_cap():
    key = canonical_key(TRIANGLE)
    assert canonical_key(graph_from_key(key)) == key
    with pytest.raises(GuardError):
        canonical_key(Multigraph.zero(9))


def test_json_and_text_round_trip():
    g = Multigraph.from_edges(3, [(0, 1), (0, 1), (2, 2)])
    assert Multigraph.from_json(g.to_json()) == g
    assert g.to_text() == "1-2:2, 3-3:1"
    assert Multigraph.from_text(3, g.to_text()) == g


def test_rejects_lower_triangle():
    with pytest.raises(ValidationError):
        Multigraph.from_matrix([[0, 0], [1, 0]])


@st.composite
def multigraphs(draw, max_n=4, max_mult=2):
    n = draw(st.integers(1, max_n))
    adj = [[draw(st.integers(0, max_mult)) if j >= i else 0 for j in range(n)] for i in range(n)]
    return Multigraph.from_matrix(adj)


@given(multigraphs())
def test_handshake(g):
    assert sum(g.degrees()) == 2 * g.edge_count()


@given(st.data())
def test_degree_additive(data):
    g1 = data.draw(multigraphs())
    g2 = data.draw(multigraphs(max_n=g1.n).filter(lambda h: h.n == g1.n))
    s = graph_sum(g1, g2)
    assert s.degrees() == tuple(a + b for a, b in zip(g1.degrees(), g2.degrees()))
    assert g1 + g2 == g2 + g1


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=1, max_size=4), st.randoms())
def test_enumeration_permutation_invariant(degs, rnd):
    perm = list(range(len(degs)))
    rnd.shuffle(perm)
    out = enumerate_graphs(len(degs), degs)
    assert len(out) == len(enumerate_graphs(len(degs), [degs[p] for p in perm]))
    assert len(set(out)) == len(out)
    assert all(g.degrees() == tuple(degs) for g in out)


@settings(max_examples=40)
@given(multigraphs(), st.randoms())
def test_components_partition_and_idempotent(g, rnd):
    comps = components(g)
    verts = sorted(v for c in comps for v in c.vertices)
    assert verts == list(range(g.n))
    inside = sum(c.graph.edge_count() for c in comps)
    assert inside == g.edge_count()
    for c in comps:
        assert len(components(c.graph)) == 1
    perm = list(range(g.n))
    rnd.shuffle(perm)
    for c in comps:
        sub = c.graph
        p = list(range(sub.n))
        rnd.shuffle(p)
        assert canonical_key(sub.permuted(p)) == canonical_key(sub)
