import itertools
import math
import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from protkernel.catalog import named_graph
from protkernel.encoders import compute_table, reference_table
from protkernel.errors import ConfigError, ResourceError
from protkernel.graph import attach_boundary, build_graph, unlabeled
from protkernel.problems import (RdsEncoder, make_fdel_encoder, make_rds_encoder, make_ris_encoder, oracle_solve,
                                 parse_problem, problem_decide, symbol_name)

from conftest import bgraph, cycle, path


def _nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def brute_rds(g, r):
    d = dict(nx.all_pairs_shortest_path_length(_nx(g), cutoff=r))
    for size in range(g.n + 1):
        for s in itertools.combinations(range(g.n), size):
            if all(any(x in d[v] for x in s) for v in range(g.n)):
                return size


def brute_scattered(g, dist):
    d = dict(nx.all_pairs_shortest_path_length(_nx(g), cutoff=dist))
    best = 0
    for size in range(1, g.n + 1):
        if any(all(b not in d[a] for a, b in itertools.combinations(s, 2))
               for s in itertools.combinations(range(g.n), size)):
            best = size
        else:
            break
    return best


def brute_deletion(g, test):
    for size in range(g.n + 1):
        for s in itertools.combinations(range(g.n), size):
            h = _nx(g)
            h.remove_nodes_from(s)
            if test(h):
                return size


def is_forest(h):
    return h.number_of_nodes() == 0 or nx.is_forest(h)


@st.composite
def graphs(draw, lo=1, hi=9):
    n = draw(st.integers(lo, hi))
    pairs = list(itertools.combinations(range(n), 2))
    return build_graph(n, draw(st.lists(st.sampled_from(pairs), unique=True, max_size=2 * n)) if pairs else [])


# ----------------------------------------------------------------- oracles

def test_oracle_examples():
    c6 = cycle(6)
    k4 = build_graph(4, list(itertools.combinations(range(4), 2)))
    assert oracle_solve("rds:r=1", c6) == 2
    assert oracle_solve("rss:r=1", c6) == 2
    assert oracle_solve("fdel:F=K3", k4) == 2
    assert oracle_solve("fdel:F=K2", named_graph("K3")) == 2
    assert problem_decide("rds:r=1", c6, 2)
    assert not problem_decide("rds:r=1", c6, 1)
    assert not problem_decide("rss:r=1", c6, 3)


@settings(max_examples=40)
@given(graphs())
def test_oracles_match_brute_force(g):
    assert oracle_solve("rds:r=1", g) == brute_rds(g, 1)
    assert oracle_solve("rds:r=2", g) == brute_rds(g, 2)
    assert oracle_solve("rss:r=1", g) == brute_scattered(g, 2)
    assert oracle_solve("fdel:F=K3", g) == brute_deletion(g, is_forest)
    assert oracle_solve("fdel:F=K2", g) == brute_deletion(g, lambda h: h.number_of_edges() == 0)


@settings(max_examples=15)
@given(graphs(3, 7))
def test_c4_deletion_oracle(g):
    from conftest import brute_minor
    c4 = named_graph("C4")
    assert oracle_solve("fdel:F=C4", g) == brute_deletion(
        g, lambda h: not brute_minor(build_graph(h.number_of_nodes(), [
            (sorted(h.nodes).index(a), sorted(h.nodes).index(b)) for a, b in h.edges]), c4))


def test_oracle_cap():
    with pytest.raises(ResourceError):
        oracle_solve("rds:r=1", path(30))


@pytest.mark.parametrize("spec", ["rds", "rds:r=0", "rds:r=9", "fdel:F=K9", "fdel:F=K3,K3", "xyz:r=1", "rss:r=x"])
def test_bad_specs(spec):
    with pytest.raises(ConfigError):
        parse_problem(spec)


def test_fdel_rejects_disconnected_member():
    with pytest.raises(ConfigError):
        make_fdel_encoder([build_graph(3, [(0, 1)])])
    with pytest.raises(ConfigError):
        make_fdel_encoder([named_graph("K5")])


# ----------------------------------------------------------------- r-DS encoder

def test_rds_encoding_count():
    assert make_rds_encoder(1).count((1, 2)) == 9
    assert len(list(make_rds_encoder(1).iter_encodings((1, 2)))) == 9


def test_rds_predicate_examples(e2):
    enc = make_rds_encoder(1)
    assert enc.satisfies(e2, {0}, (0, 1))
    assert not enc.satisfies(e2, set(), (0, 2))


def test_symbols():
    assert [symbol_name(c) for c in range(5)] == ["0", "v1", "^1", "v2", "^2"]


# ----------------------------------------------------------------- r-IS encoder

def test_ris_examples(p1):
    enc = make_ris_encoder(2)
    assert compute_table(unlabeled(cycle(6)), enc).value(()) == 2
    assert enc.satisfies(p1, {0}, ((0, 0),))
    e2 = bgraph(2, [(0, 1)], [(0, 1), (1, 2)])
    assert not make_ris_encoder(1).satisfies(e2, {0, 1}, ((0, 0, 0), (0, 0, 0)))


def test_ris_encoding_count():
    enc = make_ris_encoder(2)
    assert enc.count((1, 2)) == 4 ** 6


def test_rss_routes_to_double_distance():
    assert parse_problem("rss:r=1").encoder.name == "ris:d=2"


@settings(max_examples=25)
@given(graphs(1, 5), st.integers(0, 1))
def test_ris_table_matches_definition(g, s):
    bg = attach_boundary(g, [(0, 1)] if s else [])
    enc = make_ris_encoder(2)
    assert compute_table(bg, enc).entries == reference_table(bg, enc).entries


# ----------------------------------------------------------------- F-deletion encoder

def test_fdel_examples():
    assert compute_table(unlabeled(cycle(5)), make_fdel_encoder(["K3"])).value(frozenset()) == 1
    assert compute_table(unlabeled(named_graph("K3")), make_fdel_encoder(["K2"])).value(frozenset()) == 2


@settings(max_examples=20)
@given(graphs(1, 4), st.integers(0, 1))
def test_fdel_k2_table_matches_definition(g, s):
    bg = attach_boundary(g, [(0, 1)] if s else [])
    enc = make_fdel_encoder(["K2"])
    fast, slow = compute_table(bg, enc), reference_table(bg, enc)
    for R in enc.iter_encodings(bg.labels):
        assert fast.value(R) == slow.value(R)


def test_fdel_k3_table_matches_definition_sampled():
    enc = make_fdel_encoder(["K3"])
    rng = random.Random(5)
    for bg in [bgraph(3, [(0, 1), (1, 2)], [(0, 1)]), bgraph(3, [(0, 1), (1, 2), (0, 2)], [(2, 1)]),
               bgraph(2, [(0, 1)], [(0, 1)])]:
        fast = compute_table(bg, enc)
        encs = list(enc.iter_encodings(bg.labels))
        for R in rng.sample(encs, 150):
            want = next((size for size in range(bg.n + 1)
                         if any(enc.satisfies(bg, s, R) for s in itertools.combinations(range(bg.n), size))),
                        math.inf)
            assert fast.value(R) == want


def test_rds_radius_bounds():
    with pytest.raises(ConfigError):
        RdsEncoder(0)
