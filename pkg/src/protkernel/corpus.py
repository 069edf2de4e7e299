"""Seeded instance generators and the exhaustive host battery.

Two families are produced:

* ``sparse``: a uniform random labelled tree (random Pruefer sequence) with
  a few extra uniformly chosen edges;
* ``planar``: a random stacked triangulation (repeatedly insert a vertex into
  a random triangular face) with each edge kept with probability 0.6.

Graphs containing the excluded graph are rejected and redrawn.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator

from .graph import BoundariedGraph, Graph, build_graph
from .minors import has_minor, has_topological_minor
from .repository import enumerate_Ft

HOST_MAX = 5


def random_tree(rng: random.Random, n: int) -> list[tuple[int, int]]:
    if n <= 1:
        return []
    if n == 2:
        return [(0, 1)]
    seq = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for v in seq:
        degree[v] += 1
    edges = []
    for v in seq:
        leaf = min(u for u in range(n) if degree[u] == 1)
        edges.append((leaf, v))
        degree[leaf] -= 1
        degree[v] -= 1
    u, w = [x for x in range(n) if degree[x] == 1]
    edges.append((u, w))
    return edges


def sparse_graph(rng: random.Random, n: int, extra: int) -> Graph:
    edges = set(tuple(sorted(e)) for e in random_tree(rng, n))
    tries = 0
    while len(edges) < n - 1 + extra and tries < 50 * (extra + 1):
        tries += 1
        u, v = rng.randrange(n), rng.randrange(n)
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return build_graph(n, edges)


def planar_graph(rng: random.Random, n: int, keep: float = 0.6) -> Graph:
    if n < 3:
        return build_graph(n, [(0, 1)] if n == 2 else [])
    faces = [(0, 1, 2)]
    edges = {(0, 1), (0, 2), (1, 2)}
    for v in range(3, n):
        a, b, c = faces.pop(rng.randrange(len(faces)))
        faces += [(a, b, v), (a, c, v), (b, c, v)]
        edges |= {(a, v), (b, v), (c, v)}
    kept = [e for e in sorted(edges) if rng.random() < keep]
    return build_graph(n, kept)


@dataclass(frozen=True)
class Instance:
    name: str
    graph: Graph
    k: int


def random_corpus(seed: int, count: int, n_min: int = 8, n_max: int = 22, k_max: int = 6,
                  exclude: Graph | None = None, mode: str = "minor") -> list[Instance]:
    """``count`` instances alternating between the two families."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(n_min, n_max)
        if len(out) % 2 == 0:
            g = sparse_graph(rng, n, rng.randint(0, max(1, n // 4)))
            family = "sparse"
        else:
            g = planar_graph(rng, n)
            family = "planar"
        k = rng.randint(0, k_max)
        if exclude is not None:
            hit = has_minor(g, exclude) if mode == "minor" else has_topological_minor(g, exclude)
            if hit:
                continue
        out.append(Instance(f"{family}-{len(out)}", g, k))
    return out


def host_battery(t: int, max_size: int = HOST_MAX) -> Iterator[BoundariedGraph]:
    """Every boundaried graph with labels in ``1..t`` and at most ``max_size``
    vertices, one per isomorphism class."""
    return enumerate_Ft(t, max_size, width=max(max_size - 1, 1))
