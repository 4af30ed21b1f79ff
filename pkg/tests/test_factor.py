import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wickgraph.factor import c_general, c_general_exact, c_graph, factorial_stats
from wickgraph.graph import Multigraph, components, enumerate_graphs
from wickgraph.oracle import pairing_count_split

LOOP = Multigraph.from_matrix([[1]])
DOUBLE = Multigraph.from_matrix([[0, 2], [0, 0]])
TRIANGLE = Multigraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


def test_c_graph_examples():
    assert c_graph(LOOP) == 1
    assert c_graph(DOUBLE) == 2
    assert c_graph(TRIANGLE) == 8


def test_c_general_single_column_matches_graph():
    assert c_general([[1]], [[2]]) == 1
    assert c_general(DOUBLE.upper, [[2], [2]]) == 2


def test_c_general_two_classes():
    # frozen from the per-class pairing oracle
    M, A = [[0, 2], [0, 0]], [[1, 1], [1, 1]]
    assert pairing_count_split(M, A) == 1
    assert c_general(M, A) == 1


def test_c_general_no_decomposition():
    assert c_general([[0, 1], [0, 0]], [[2], [0]]) == 0


def test_factorial_stats_examples():
    s = factorial_stats([[2, 1], [0, 3]])
    assert (s.total, s.trace, s.factorial_product) == (6, 5, 12)
    assert s.column_sums == (2, 4) and s.row_sums == (3, 3)
    z = factorial_stats([[0, 0], [0, 0]])
    assert (z.total, z.factorial_product, z.entry_product) == (0, 1, 0)
    one = factorial_stats([[1]])
    assert one.SC(0) == one.SR(0) == 1


def test_factorial_stats_rectangular():
    s = factorial_stats([[1, 2, 3]])
    assert s.trace is None and s.entry_product == 6


@st.composite
def multigraphs(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    adj = [[draw(st.integers(0, 2)) if j >= i else 0 for j in range(n)] for i in range(n)]
    return Multigraph.from_matrix(adj)


@given(multigraphs(), st.randoms())
def test_c_graph_relabeling_invariant(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    assert c_graph(g.permuted(perm)) == c_graph(g)


@given(multigraphs())
def test_c_graph_multiplicative_over_components(g):
    prod = 1
    for comp in components(g):
        prod *= c_graph(comp.graph)
    assert c_graph(g) == prod


@given(multigraphs(max_n=3))
def test_c_general_one_column_reduces_to_graph(g):
    assert c_general(g.upper, [[d] for d in g.degrees()]) == c_graph(g)


def _random_instance(rng: random.Random, upper: bool):
    n, l = rng.randint(1, 3), rng.randint(1, 3)
    while True:
        parts = []
        for _ in range(l):
            Mk = [[0] * n for _ in range(n)]
            for p in range(n):
                for q in range(n):
                    if (not upper or q >= p) and rng.random() < 0.5:
                        Mk[p][q] = rng.randint(0, 2)
            parts.append(Mk)
        M = [[sum(Mk[p][q] for Mk in parts) for q in range(n)] for p in range(n)]
        if max(max(r) for r in M) <= 3:
            break
    A = [[sum(parts[k][j]) + sum(parts[k][i][j] for i in range(n)) for k in range(l)] for j in range(n)]
    return M, A


def test_c_general_integral_random():
    rng = random.Random(20240611)
    for trial in range(100):
        M, A = _random_instance(rng, upper=trial % 2 == 0)
        value = c_general_exact(M, A)
        assert value.denominator == 1 and value >= 1


def test_c_general_matches_split_pairing_count():
    rng = random.Random(7)
    for _ in range(40):
        M, A = _random_instance(rng, upper=True)
        if sum(map(sum, A)) > 10:
            continue
        assert c_general(M, A) == pairing_count_split(M, A)


def test_c_general_exact_returns_fraction():
    assert isinstance(c_general_exact([[1]], [[2]]), Fraction)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=3))
def test_c_graph_sums_to_double_factorial(degs):
    from wickgraph.oracle import double_factorial

    total = sum(c_graph(g) for g in enumerate_graphs(len(degs), degs))
    expected = double_factorial(sum(degs) - 1) if sum(degs) % 2 == 0 else 0
    assert total == expected


@pytest.mark.parametrize("M", [[[0, 2], [0, 0]], [[1, 1], [0, 1]], [[2]]])
def test_c_general_nonnegative_int(M):
    g = Multigraph.from_matrix(M)
    assert isinstance(c_general(M, [[d] for d in g.degrees()]), int)
