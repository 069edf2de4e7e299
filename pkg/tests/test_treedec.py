import itertools
import random

import pytest
from hypothesis import given, strategies as st

from protkernel.errors import ResourceError, WidthBoundError
from protkernel.graph import attach_boundary, build_graph, unlabeled
from protkernel.treedec import (TreeDecomposition, decomposition_from_order, dump_decomposition, elimination_order,
                                exact_treewidth, make_nice, rooted_nice_decomposition, rooted_width,
                                subtree_vertices, treewidth_at_most, validate_decomposition, validate_nice)

from conftest import bgraph, brute_treewidth, cycle, path


def complete(n):
    return build_graph(n, list(itertools.combinations(range(n), 2)))


def grid(a, b):
    idx = lambda i, j: i * b + j
    edges = [(idx(i, j), idx(i, j + 1)) for i in range(a) for j in range(b - 1)]
    edges += [(idx(i, j), idx(i + 1, j)) for i in range(a - 1) for j in range(b)]
    return build_graph(a * b, edges)


@pytest.mark.parametrize("g,expected", [
    (build_graph(0, []), 0),
    (build_graph(3, []), 0),
    (path(7), 1),
    (cycle(5), 2),
    (complete(4), 3),
    (complete(6), 5),
    (grid(3, 3), 3),
    (grid(4, 4), 4),
])
def test_exact_treewidth_known(g, expected):
    assert exact_treewidth(g) == expected


@st.composite
def small_graphs(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return build_graph(n, chosen)


@given(small_graphs())
def test_exact_treewidth_matches_brute_force(g):
    tw = brute_treewidth(g)
    assert exact_treewidth(g) == tw
    for bound in range(0, 5):
        assert treewidth_at_most(g, bound) == (tw <= bound)


def test_treewidth_cap_is_enforced():
    rng = random.Random(3)
    edges = [(u, v) for u, v in itertools.combinations(range(26), 2) if rng.random() < 0.5]
    with pytest.raises(ResourceError):
        exact_treewidth(build_graph(26, edges), cap=20)


def test_large_series_parallel_skips_cap():
    assert exact_treewidth(cycle(40)) == 2
    assert treewidth_at_most(path(60), 1)


def test_e2_single_root_bag():
    e2 = bgraph(2, [(0, 1)], [(0, 1), (1, 2)])
    w, order = elimination_order(e2, 1)
    td = decomposition_from_order(e2.graph, e2.boundary_mask, order)
    assert w == 1 and td.bags == (frozenset({0, 1}),)
    assert dump_decomposition(td) == "0 -1 node {0,1}\n"
    nice = rooted_nice_decomposition(e2, 1)
    assert nice.width == 1 and nice.bags[nice.root] == frozenset({0, 1})


def test_p4_rooted_decomposition():
    p4 = bgraph(4, [(0, 1), (1, 2), (2, 3)], [(0, 1)])
    td = rooted_nice_decomposition(p4, 1)
    assert td.width == 1
    assert validate_decomposition(p4.graph, td)
    assert validate_nice(td, [0])
    assert 0 in td.bags[td.root]


def test_k4_exceeds_bound_with_certificate():
    with pytest.raises(WidthBoundError) as info:
        rooted_nice_decomposition(unlabeled(complete(4)), 1)
    assert info.value.certificate == 3


def test_boundary_clique_raises_rooted_width():
    # two nonadjacent boundary vertices joined by a long path: the root bag forces width 2
    bg = attach_boundary(path(5), [(0, 1), (4, 2)])
    assert exact_treewidth(path(5)) == 1
    assert rooted_width(bg) == 2


def test_validation_detects_each_condition():
    g = path(4)
    good = TreeDecomposition((frozenset({0, 1}), frozenset({1, 2}), frozenset({2, 3})), (-1, 0, 1), 0)
    assert validate_decomposition(g, good)
    missing_edge = TreeDecomposition((frozenset({0, 1}), frozenset({1}), frozenset({2, 3})), (-1, 0, 1), 0)
    assert validate_decomposition(g, missing_edge).condition == "ii"
    split = TreeDecomposition((frozenset({0, 1}), frozenset({1, 2}), frozenset({2, 3}), frozenset({0})),
                              (-1, 0, 1, 2), 0)
    assert validate_decomposition(g, split).condition == "iii"
    uncovered = TreeDecomposition((frozenset({0, 1}), frozenset({1, 2})), (-1, 0), 0)
    assert validate_decomposition(g, uncovered).condition == "i"


@given(small_graphs(8), st.data())
def test_generated_decompositions_are_valid(g, data):
    s = data.draw(st.integers(0, min(2, g.n)))
    bnd = [(v, i + 1) for i, v in enumerate(data.draw(st.permutations(range(g.n)))[:s])]
    bg = attach_boundary(g, bnd)
    w, order = elimination_order(bg)
    assert w == rooted_width(bg)
    td = decomposition_from_order(g, bg.boundary_mask, order)
    nice = make_nice(td)
    assert validate_decomposition(g, td) and validate_decomposition(g, nice)
    assert validate_nice(nice, [v for v, _ in bg.boundary])
    assert nice.width == td.width == w
    assert len(nice.bags) <= 4 * (g.n + 1) + 1
    assert subtree_vertices(nice)[nice.root] == frozenset(range(g.n))


@given(small_graphs(9))
def test_greedy_order_is_an_upper_bound(g):
    bg = unlabeled(g)
    w, order = elimination_order(bg, exact=False)
    assert w >= exact_treewidth(g)
    assert validate_decomposition(g, decomposition_from_order(g, 0, order))
