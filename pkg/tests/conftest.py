import itertools

import pytest
from hypothesis import HealthCheck, settings

from protkernel.graph import Graph, attach_boundary, bits, build_graph

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def bgraph(n, edges, boundary):
    return attach_boundary(build_graph(n, edges), boundary)


def path(n):
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def brute_treewidth(g: Graph) -> int:
    """Minimum over all elimination orders of the largest later-neighbourhood."""
    if g.n == 0:
        return 0
    best = g.n
    for order in itertools.permutations(range(g.n)):
        adj = list(g.adj)
        alive = (1 << g.n) - 1
        width = 0
        for v in order:
            nb = adj[v] & alive & ~(1 << v)
            width = max(width, nb.bit_count())
            if width >= best:
                break
            for u in bits(nb):
                adj[u] |= nb & ~(1 << u)
            alive &= ~(1 << v)
        best = min(best, width)
    return best


def brute_minor(g: Graph, f: Graph) -> bool:
    """Try every map of host vertices to pattern vertices or 'unused'."""
    h = f.n
    for assign in itertools.product(range(h + 1), repeat=g.n):
        sets = [[v for v in range(g.n) if assign[v] == u] for u in range(h)]
        if any(not s for s in sets):
            continue
        ok = True
        for s in sets:
            m = 0
            for v in s:
                m |= 1 << v
            seen = 1 << s[0]
            frontier = seen
            while frontier:
                nxt = 0
                for v in bits(frontier):
                    nxt |= g.adj[v] & m
                nxt &= ~seen
                seen |= nxt
                frontier = nxt
            if seen != m:
                ok = False
                break
        if not ok:
            continue
        if all(any(g.has_edge(a, b) for a in sets[u] for b in sets[w]) for u, w in f.edges):
            return True
    return False


@pytest.fixture
def p1():
    return bgraph(1, [], [(0, 1)])


@pytest.fixture
def p4():
    return bgraph(4, [(0, 1), (1, 2), (2, 3)], [(0, 1)])


@pytest.fixture
def p2():
    return bgraph(2, [(0, 1)], [(0, 1)])


@pytest.fixture
def e2():
    return bgraph(2, [(0, 1)], [(0, 1), (1, 2)])
