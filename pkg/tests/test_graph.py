import random

import pytest
from hypothesis import given, strategies as st

from protkernel.errors import InputError
from protkernel.graph import (Graph, attach_boundary, ball_mask, bfs_distances, build_graph, canonical_code,
                              components, contract_edge, format_graph, glue, graph_from_code, induced_boundaried,
                              is_connected, is_forest, parse_graph, relabel, remove_vertices, unlabeled)

from conftest import bgraph, cycle, path


@st.composite
def graphs(draw, max_n=7):
    n = draw(st.integers(0, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return build_graph(n, chosen)


@st.composite
def boundaried(draw, max_n=7, max_t=3):
    g = draw(graphs(max_n))
    if g.n == 0:
        return unlabeled(g)
    s = draw(st.integers(0, min(max_t, g.n)))
    verts = draw(st.permutations(range(g.n)))[:s]
    labels = sorted(draw(st.lists(st.integers(1, max_t), min_size=s, max_size=s, unique=True)))
    return attach_boundary(g, zip(verts, labels))


def test_build_rejects_bad_edges():
    with pytest.raises(InputError):
        build_graph(2, [(0, 0)])
    with pytest.raises(InputError):
        build_graph(2, [(0, 2)])
    with pytest.raises(InputError):
        build_graph(-1, [])


def test_duplicate_edges_collapse():
    g = build_graph(3, [(0, 1), (1, 0), (1, 2)])
    assert g.m == 2
    assert g.neighbors(1) == [0, 2]


def test_boundary_validation():
    g = path(3)
    with pytest.raises(InputError):
        attach_boundary(g, [(0, 1), (0, 2)])
    with pytest.raises(InputError):
        attach_boundary(g, [(0, 1), (1, 1)])
    with pytest.raises(InputError):
        attach_boundary(g, [(0, 0)])


def test_glue_identifies_labels():
    a = bgraph(2, [(0, 1)], [(0, 1), (1, 2)])
    b = bgraph(3, [(0, 1), (1, 2)], [(0, 1), (2, 2)])
    g = glue(a, b)
    # edge 0-1 from a, path 0-x-1 from b: a triangle
    assert g.n == 3 and g.m == 3


def test_glue_keeps_union_boundary():
    a = bgraph(1, [], [(0, 1)])
    b = bgraph(2, [], [(0, 2)])
    out = glue(a, b, keep_boundary=True)
    assert out.labels == (1, 2) and out.n == 3


def test_glue_with_empty_boundary_is_disjoint_union():
    g = glue(unlabeled(path(3)), unlabeled(cycle(4)))
    assert g.n == 7 and g.m == 6
    assert len(components(g)) == 2


def test_contract_and_remove():
    g, vmap = contract_edge(cycle(4), (0, 1))
    assert g.n == 3 and g.m == 3
    assert vmap[1] == 0
    h, vm = remove_vertices(cycle(5), [2])
    assert h.n == 4 and h.m == 3 and 2 not in vm
    with pytest.raises(InputError):
        contract_edge(cycle(4), (0, 2))


def test_distances_and_balls():
    g = path(5)
    assert bfs_distances(g, 0) == [0, 1, 2, 3, 4]
    assert ball_mask(g, 2, 1) == 0b01110
    h = build_graph(3, [(0, 1)])
    assert bfs_distances(h, 0)[2] == float("inf")


def test_forest_and_connectivity():
    assert is_forest(path(6)) and not is_forest(cycle(3))
    assert is_connected(cycle(5)) and not is_connected(build_graph(2, []))


def test_induced_boundaried_labels_in_order():
    bg, vmap = induced_boundaried(cycle(6), [1, 2, 3], [3, 1])
    assert bg.labels == (1, 2)
    assert bg.vertex_of[1] == vmap[3]


def test_text_roundtrip():
    bg = bgraph(4, [(0, 1), (2, 3)], [(3, 1), (0, 4)])
    assert parse_graph(format_graph(bg)) == bg


@pytest.mark.parametrize("text", [
    "", "3", "3 1\n0 1\n1 2\n", "2 1\n0 x\n", "2 1\n0 1\nq 0 1\n", "2 2\n0 1\n1 0\n", "2 1\n0 1\nb 0 1\nb 1 1\n",
])
def test_parser_is_strict(text):
    with pytest.raises(InputError):
        parse_graph(text)


@given(boundaried())
def test_canonical_code_is_relabel_invariant(bg):
    perm = list(range(bg.n))
    random.Random(bg.n * 7 + len(bg.graph.edges)).shuffle(perm)
    assert canonical_code(relabel(bg, perm)) == canonical_code(bg)


@given(boundaried())
def test_graph_from_code_inverts(bg):
    assert canonical_code(graph_from_code(canonical_code(bg))) == canonical_code(bg)


def test_canonical_code_distinguishes_labels():
    a = bgraph(2, [(0, 1)], [(0, 1)])
    b = bgraph(2, [(0, 1)], [(0, 2)])
    c = bgraph(3, [(0, 1), (1, 2)], [(0, 1)])
    d = bgraph(3, [(0, 1), (1, 2)], [(1, 1)])
    assert canonical_code(a) != canonical_code(b)
    assert canonical_code(c) != canonical_code(d)


def test_canonical_code_separates_nonisomorphic():
    assert canonical_code(cycle(6)) != canonical_code(Graph(6, ((0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5))))
