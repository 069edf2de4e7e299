import itertools
import math

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from protkernel.encoders import (MAX, MIN, Encoder, EncoderTable, canonical_refinement_check, check_confinement,
                                 compute_table, confine_table, encoder_equivalent, normalize_signature,
                                 reference_table, spread, transposition)
from protkernel.errors import ResourceError
from protkernel.graph import attach_boundary, build_graph, unlabeled
from protkernel.problems import make_rds_encoder, parse_problem
from protkernel.repository import enumerate_Ft

from conftest import bgraph, cycle, path

RDS1 = make_rds_encoder(1)
ZERO, DOWN1, UP1 = 0, 1, 2


def _nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def rds_predicate(bg, s, enc, r):
    """Partial r-domination written from the definition with networkx distances."""
    d = dict(nx.all_pairs_shortest_path_length(_nx(bg.graph)))
    dist = lambda a, b: d[a].get(b, math.inf)
    code = dict(zip(bg.boundary_vertices, enc))
    ups = [(w, c // 2) for w, c in code.items() if c and c % 2 == 0]
    covered = lambda v, rad: any(dist(v, x) <= rad for x in s) or any(dist(v, w) + j <= rad for w, j in ups)
    for v in range(bg.n):
        if v not in code:
            if not covered(v, r):
                return False
        elif code[v] == 0 and v not in s:
            return False
        elif code[v] % 2 == 1 and not covered(v, (code[v] + 1) // 2):
            return False
    return True


def brute_table(bg, r):
    enc = make_rds_encoder(r)
    out = {}
    for R in enc.iter_encodings(bg.labels):
        for size in range(bg.n + 1):
            if any(rds_predicate(bg, set(s), R, r) for s in itertools.combinations(range(bg.n), size)):
                out[R] = size
                break
    return out


# ----------------------------------------------------------------- tables

def test_e2_table_entries(e2):
    tab = compute_table(e2, RDS1)
    assert tab.value((ZERO, ZERO)) == 2
    assert tab.value((DOWN1, DOWN1)) == 1
    assert tab.value((UP1, UP1)) == 0


def test_p1_and_p4_tables(p1, p4):
    assert [compute_table(p1, RDS1).value((c,)) for c in (ZERO, DOWN1, UP1)] == [1, 1, 0]
    assert [compute_table(p4, RDS1).value((c,)) for c in (ZERO, DOWN1, UP1)] == [2, 2, 1]


def test_zero_boundary_c6():
    tab = compute_table(unlabeled(cycle(6)), RDS1)
    assert tab.value(()) == 2


def test_table_cap():
    with pytest.raises(ResourceError):
        compute_table(unlabeled(path(15)), RDS1)


@st.composite
def small_bgraphs(draw, max_n=6, max_t=2):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    g = build_graph(n, draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else [])
    s = draw(st.integers(0, min(max_t, n)))
    verts = draw(st.permutations(range(n)))[:s]
    return attach_boundary(g, [(v, i + 1) for i, v in enumerate(verts)])


@settings(max_examples=40)
@given(small_bgraphs(), st.integers(1, 2))
def test_rds_table_matches_definition(bg, r):
    assert compute_table(bg, make_rds_encoder(r)).entries == brute_table(bg, r)


@settings(max_examples=30)
@given(small_bgraphs(5))
def test_reference_table_agrees_with_fast_table(bg):
    assert reference_table(bg, RDS1).entries == compute_table(bg, RDS1).entries


# ----------------------------------------------------------------- truncation

def _t(values, direction=MIN):
    return EncoderTable(direction, (1,), {i: v for i, v in enumerate(values) if v is not None})


def test_confine_table_examples():
    assert confine_table(_t([1, 1, 0]), 2).entries == _t([1, 1, 0]).entries
    assert confine_table(_t([5, 0, 1]), 2).entries == {1: 0, 2: 1}
    empty = _t([None, None])
    assert confine_table(empty, 2) == empty


def test_confine_table_max_direction():
    tab = confine_table(_t([7, 2, 6], MAX), 2)
    assert tab.entries == {0: 7, 2: 6}


def test_spread_and_confinement(e2, p1):
    assert spread(compute_table(e2, RDS1)) == 2
    c = check_confinement(e2, RDS1, 2)
    assert c.ok and c.spread == 2 and c.bound == 2
    c = check_confinement(p1, RDS1, 1)
    assert c.ok and c.spread == 1


class _Loose(Encoder):
    """Negative control: every label must be in S, plus nothing constrains the rest."""

    name = "loose"
    direction = MIN

    def g(self, t):
        return 0

    def iter_encodings(self, labels):
        return iter([0, 1])

    def satisfies(self, bg, solution, encoding):
        return len(solution) >= encoding * bg.n

    def table(self, bg):
        return reference_table(bg, self)


def test_confinement_negative_control():
    c = check_confinement(unlabeled(path(3)), _Loose(), 1)
    assert not c.ok and c.spread == 3


# ----------------------------------------------------------------- normalization

def test_normalize_examples():
    enc = RDS1
    two = EncoderTable(MIN, (1,), {(0,): 2, (1,): 2, (2,): 1})
    one = EncoderTable(MIN, (1,), {(0,): 1, (1,): 1, (2,): 0})
    assert normalize_signature(two, enc).entries == (1, 1, 0)
    assert normalize_signature(one, enc) == normalize_signature(two, enc)
    holes = EncoderTable(MIN, (1,), {(1,): 3, (2,): 5})
    assert normalize_signature(holes, enc).entries == (None, 0, 2)


# ----------------------------------------------------------------- equivalence

def test_p1_p4_equivalent_with_minus_one(p1, p4, p2):
    assert encoder_equivalent(p1, p4, RDS1, 1) == -1
    assert encoder_equivalent(p4, p1, RDS1, 1) == 1
    assert encoder_equivalent(p1, p1, RDS1, 1) == 0
    assert encoder_equivalent(p1, p2, RDS1, 1) is None


def test_label_mismatch_is_inequivalent(p1, e2):
    assert encoder_equivalent(p1, e2, RDS1) is None


def test_class_signature_hook(p1, p4):
    assert encoder_equivalent(p1, p4, RDS1, 1, class_sig_fn=lambda g: g.n) is None


def test_transposition_all_infinite():
    a = EncoderTable(MIN, (1,), {})
    assert transposition(a, a) == 0


def test_equivalence_relation_on_sample():
    graphs = [g for g in enumerate_Ft(1, 4) if g.labels == (1,)]
    tables = {g: confine_table(compute_table(g, RDS1), 1) for g in graphs}
    for a, b, c in itertools.product(graphs[:12], repeat=3):
        ab, bc, ac = (transposition(tables[x], tables[y]) for x, y in ((a, b), (b, c), (a, c)))
        if ab is not None:
            assert transposition(tables[b], tables[a]) == -ab
        if ab is not None and bc is not None:
            assert ac == ab + bc


# ----------------------------------------------------------------- refinement

@pytest.fixture(scope="module")
def hosts():
    return [h for h in enumerate_Ft(1, 5, width=4)]


def test_refinement_p1_p4(p1, p4, hosts):
    problem = parse_problem("rds:r=1")
    rep = canonical_refinement_check(p1, p4, -1, problem, hosts)
    assert rep.ok and rep.checked == len(hosts) * 7


def test_refinement_reflexive(p4, hosts):
    assert canonical_refinement_check(p4, p4, 0, parse_problem("rds:r=1"), hosts).ok


def test_refinement_negative_control(p1, p2, hosts):
    rep = canonical_refinement_check(p1, p2, 0, parse_problem("rds:r=1"), hosts)
    assert not rep.ok and rep.mismatches
    forged = canonical_refinement_check(p1, p4_like(), 0, parse_problem("rds:r=1"), hosts, stop_at_first=True)
    assert not forged.ok and len(forged.mismatches) == 1


def p4_like():
    return bgraph(4, [(0, 1), (1, 2), (2, 3)], [(0, 1)])
