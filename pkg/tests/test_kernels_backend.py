import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from protkernel import _kernels_py as py
from protkernel import kernels

cy = pytest.importorskip("protkernel._kernels")


@st.composite
def adjacency(draw, lo=1, hi=8):
    n = draw(st.integers(lo, hi))
    adj = [0] * n
    for u, v in itertools.combinations(range(n), 2):
        if draw(st.booleans()):
            adj[u] |= 1 << v
            adj[v] |= 1 << u
    return n, adj


def _balls(n, adj, radius):
    dist = py.bfs_all(n, adj)
    return [[sum(1 << u for u in range(n) if 0 <= dist[v][u] <= rho) for v in range(n)] for rho in range(radius + 1)]


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


@given(adjacency())
def test_bfs_all_agrees(g):
    n, adj = g
    assert list(map(list, cy.bfs_all(n, adj))) == list(map(list, py.bfs_all(n, adj)))


@given(adjacency(1, 7), st.randoms(use_true_random=False))
def test_ds_table_agrees(g, rng):
    n, adj = g
    balls = _balls(n, adj, 2)
    reqs = []
    for _ in range(6):
        zero = rng.getrandbits(n) & rng.getrandbits(n)
        needs = [rng.getrandbits(n) for _ in balls]
        reqs.append((zero, needs))
    assert list(cy.ds_table(n, balls, reqs)) == list(py.ds_table(n, balls, reqs))


@given(adjacency(1, 8), st.integers(0, 2))
def test_independent_profiles_agree(g, s):
    n, adj = g
    s = min(s, n)
    dist = py.bfs_all(n, adj)
    cap = 3
    conflict = [sum(1 << u for u in range(n) if 0 <= dist[v][u] <= 1) for v in range(n)]
    bdist = [[cap if dist[i][v] < 0 else min(dist[i][v], cap) for v in range(n)] for i in range(s)]
    assert list(cy.independent_profiles(n, conflict, bdist, cap)) == list(py.independent_profiles(n, conflict, bdist, cap))


@given(adjacency(1, 9))
def test_cover_and_packing_agree(g):
    n, adj = g
    balls = _balls(n, adj, 1)[1]
    assert tuple(cy.min_cover(n, balls, n)) == tuple(py.min_cover(n, balls, n))
    conflict = [adj[v] | 1 << v for v in range(n)]
    assert cy.max_packing(n, conflict)[0] == py.max_packing(n, conflict)[0]


@given(adjacency(1, 8), st.integers(0, 3))
def test_treewidth_dp_agrees(g, roots):
    n, adj = g
    last = (1 << min(roots, n)) - 1
    adj = list(adj)
    for v in range(min(roots, n)):
        adj[v] |= last & ~(1 << v)
    w1, o1 = cy.treewidth_dp(n, adj, last, n + 1)
    w2, o2 = py.treewidth_dp(n, adj, last, n + 1)
    assert w1 == w2
    assert (o1 is None) == (o2 is None)


@settings(max_examples=30)
@given(adjacency(1, 6), st.integers(0, 2), st.integers(1, 3))
def test_block_partitions_agree(g, s, h):
    n, adj = g
    bmask = (1 << min(s, n)) - 1
    full = (1 << n) - 1
    a = sorted(cy.block_partitions(n, adj, full, bmask, h))
    b = sorted(py.block_partitions(n, adj, full, bmask, h))
    assert a == b


def test_pure_switch_in_subprocess():
    import subprocess
    import sys
    env = {"PROTKERNEL_PURE": "1", "PATH": "/usr/bin:/bin"}
    out = subprocess.run([sys.executable, "-c", "import protkernel.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
