"""Simple graphs, boundaried graphs, gluing and a label-respecting canonical code.

Vertices are dense integers ``0..n-1``. Graph values are immutable; every
operation that drops vertices also returns the old-to-new vertex map.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .config import CANON_CAP
from .errors import InputError, ResourceError

INF = float("inf")


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]

    @cached_property
    def adj(self) -> tuple[int, ...]:
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return tuple(masks)

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> list[int]:
        return _bits(self.adj[v])

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={list(self.edges)})"


@dataclass(frozen=True)
class BoundariedGraph:
    graph: Graph
    boundary: tuple[tuple[int, int], ...] = field(default=())

    @property
    def n(self) -> int:
        return self.graph.n

    @cached_property
    def labels(self) -> tuple[int, ...]:
        return tuple(lab for _, lab in self.boundary)

    @cached_property
    def boundary_vertices(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.boundary)

    @cached_property
    def boundary_mask(self) -> int:
        mask = 0
        for v, _ in self.boundary:
            mask |= 1 << v
        return mask

    @cached_property
    def label_of(self) -> dict[int, int]:
        return {v: lab for v, lab in self.boundary}

    @cached_property
    def vertex_of(self) -> dict[int, int]:
        return {lab: v for v, lab in self.boundary}

    def __repr__(self) -> str:
        return f"BoundariedGraph(n={self.n}, edges={list(self.graph.edges)}, boundary={list(self.boundary)})"


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask`` in increasing order."""
    return _bits(mask)


def mask_of(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def build_graph(n: int, edge_list: Iterable[Sequence[int]]) -> Graph:
    if n < 0:
        raise InputError(f"vertex count must be non-negative, got {n}")
    seen = set()
    for e in edge_list:
        if len(e) != 2:
            raise InputError(f"edge {e!r} is not a pair")
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < n and 0 <= v < n):
            raise InputError(f"edge ({u},{v}) has an endpoint outside 0..{n - 1}")
        if u == v:
            raise InputError(f"self-loop at vertex {u}")
        seen.add((u, v) if u < v else (v, u))
    return Graph(n, tuple(sorted(seen)))


def attach_boundary(g: Graph, labeling: Iterable[Sequence[int]]) -> BoundariedGraph:
    pairs = [(int(v), int(lab)) for v, lab in labeling]
    vs = [v for v, _ in pairs]
    labs = [lab for _, lab in pairs]
    if len(set(vs)) != len(vs):
        raise InputError("a boundary vertex is listed twice")
    if len(set(labs)) != len(labs):
        raise InputError("boundary labels must be distinct")
    for v, lab in pairs:
        if not 0 <= v < g.n:
            raise InputError(f"boundary vertex {v} does not exist")
        if lab < 1:
            raise InputError(f"labels must be positive integers, got {lab}")
    return BoundariedGraph(g, tuple(sorted(pairs, key=lambda p: p[1])))


def unlabeled(g: Graph) -> BoundariedGraph:
    return BoundariedGraph(g, ())


def glue(g1: BoundariedGraph, g2: BoundariedGraph, keep_boundary: bool = False):
    """Disjoint union identifying equal-label boundary vertices.

    Vertices of ``g1`` keep their ids; non-identified vertices of ``g2``
    follow. With ``keep_boundary`` the union of both boundaries is retained
    and a :class:`BoundariedGraph` is returned.
    """
    n1 = g1.n
    where = {}
    nxt = n1
    for v in range(g2.n):
        lab = g2.label_of.get(v)
        if lab is not None and lab in g1.vertex_of:
            where[v] = g1.vertex_of[lab]
        else:
            where[v] = nxt
            nxt += 1
    edges = set(g1.graph.edges)
    for u, v in g2.graph.edges:
        a, b = where[u], where[v]
        edges.add((a, b) if a < b else (b, a))
    g = Graph(nxt, tuple(sorted(edges)))
    if not keep_boundary:
        return g
    bd = dict((lab, v) for v, lab in g1.boundary)
    for v, lab in g2.boundary:
        bd.setdefault(lab, where[v])
    return BoundariedGraph(g, tuple(sorted(((v, lab) for lab, v in bd.items()), key=lambda p: p[1])))


def contract_edge(g: Graph, e: Sequence[int]) -> tuple[Graph, dict[int, int]]:
    """Contract edge ``e``; the merged vertex takes the smaller endpoint's slot."""
    x, y = int(e[0]), int(e[1])
    if not (0 <= x < g.n and 0 <= y < g.n) or not g.has_edge(x, y):
        raise InputError(f"({x},{y}) is not an edge")
    keep, gone = min(x, y), max(x, y)
    vmap = {}
    for v in range(g.n):
        if v == gone:
            vmap[v] = keep if keep < gone else keep - 1
        else:
            vmap[v] = v if v < gone else v - 1
    edges = set()
    for u, v in g.edges:
        a, b = vmap[u], vmap[v]
        if a != b:
            edges.add((a, b) if a < b else (b, a))
    return Graph(g.n - 1, tuple(sorted(edges))), vmap


def remove_vertices(g: Graph, xs: Iterable[int]) -> tuple[Graph, dict[int, int]]:
    drop = set(xs)
    vmap = {}
    for v in range(g.n):
        if v not in drop:
            vmap[v] = len(vmap)
    edges = tuple(sorted((vmap[u], vmap[v]) for u, v in g.edges if u in vmap and v in vmap))
    return Graph(len(vmap), edges), vmap


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> tuple[Graph, dict[int, int]]:
    keep = set(vertices)
    return remove_vertices(g, [v for v in range(g.n) if v not in keep])


def induced_boundaried(g: Graph, vertices: Iterable[int], boundary: Sequence[int]) -> tuple[BoundariedGraph, dict[int, int]]:
    """``g[vertices]`` with ``boundary`` (a sequence of vertices of ``g``) labeled 1, 2, ..."""
    sub, vmap = induced_subgraph(g, vertices)
    return attach_boundary(sub, [(vmap[v], i + 1) for i, v in enumerate(boundary)]), vmap


def disjoint_union(g1: Graph, g2: Graph) -> Graph:
    shift = g1.n
    return Graph(g1.n + g2.n, g1.edges + tuple((u + shift, v + shift) for u, v in g2.edges))


def bfs_distances(g: Graph, source: int) -> list:
    dist: list = [INF] * g.n
    dist[source] = 0
    q = deque([source])
    adj = g.adj
    while q:
        u = q.popleft()
        du = dist[u] + 1
        for w in _bits(adj[u]):
            if dist[w] == INF:
                dist[w] = du
                q.append(w)
    return dist


def distance(g: Graph, u: int, v: int):
    """Hop distance from ``u`` to ``v``; ``inf`` when disconnected."""
    return bfs_distances(g, u)[v]


def all_distances(g: Graph) -> list[list]:
    return [bfs_distances(g, s) for s in range(g.n)]


def set_distance(g: Graph, v: int, s: Iterable[int]):
    d = bfs_distances(g, v)
    return min((d[x] for x in s), default=INF)


def ball_mask(g: Graph, v: int, radius: int) -> int:
    """Bitmask of vertices within distance ``radius`` of ``v``."""
    seen = 1 << v
    frontier = seen
    adj = g.adj
    for _ in range(radius):
        nxt = 0
        for w in _bits(frontier):
            nxt |= adj[w]
        nxt &= ~seen
        if not nxt:
            break
        seen |= nxt
        frontier = nxt
    return seen


def components(g: Graph, within: int | None = None) -> list[int]:
    """Connected components of ``g[within]`` as bitmasks, ordered by least vertex."""
    rest = (1 << g.n) - 1 if within is None else within
    adj = g.adj
    out = []
    while rest:
        low = rest & -rest
        comp = low
        frontier = low
        while frontier:
            nxt = 0
            for w in _bits(frontier):
                nxt |= adj[w]
            nxt &= rest & ~comp
            comp |= nxt
            frontier = nxt
        out.append(comp)
        rest &= ~comp
    return out


def is_connected(g: Graph, within: int | None = None) -> bool:
    return len(components(g, within)) <= 1


def is_forest(g: Graph, within: int | None = None) -> bool:
    mask = (1 << g.n) - 1 if within is None else within
    n = mask.bit_count()
    m = sum((g.adj[v] & mask).bit_count() for v in _bits(mask)) // 2
    return m == n - len(components(g, mask))


# ---------------------------------------------------------------- text format

def format_graph(g) -> str:
    """Serialize a Graph or BoundariedGraph to the ``n m`` edge-list text format."""
    bg = g if isinstance(g, BoundariedGraph) else unlabeled(g)
    lines = [f"{bg.graph.n} {bg.graph.m}"]
    lines += [f"{u} {v}" for u, v in bg.graph.edges]
    lines += [f"b {v} {lab}" for v, lab in bg.boundary]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> BoundariedGraph:
    """Strict parser for the edge-list format.

    Blank lines are ignored; anything else that is not part of the format,
    including surplus edge lines or tokens, is rejected.
    """
    rows = [ln.split() for ln in text.splitlines()]
    rows = [r for r in rows if r]
    if not rows:
        raise InputError("empty graph text")
    head = rows[0]
    if len(head) != 2:
        raise InputError("header must be 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise InputError("header must contain two integers") from None
    if n < 0 or m < 0:
        raise InputError("header values must be non-negative")
    if len(rows) < 1 + m:
        raise InputError(f"expected {m} edge lines, found {len(rows) - 1}")
    edges = []
    for r in rows[1:1 + m]:
        if len(r) != 2:
            raise InputError(f"bad edge line {' '.join(r)!r}")
        try:
            edges.append((int(r[0]), int(r[1])))
        except ValueError:
            raise InputError(f"bad edge line {' '.join(r)!r}") from None
    labeling = []
    for r in rows[1 + m:]:
        if len(r) != 3 or r[0] != "b":
            raise InputError(f"unexpected trailing content {' '.join(r)!r}")
        try:
            labeling.append((int(r[1]), int(r[2])))
        except ValueError:
            raise InputError(f"bad boundary line {' '.join(r)!r}") from None
    g = build_graph(n, edges)
    if len(g.edges) != m:
        raise InputError("duplicate edges in input")
    return attach_boundary(g, labeling)


# ------------------------------------------------------------- canonical code

def _refine(adj: Sequence[int], colors: list[int]) -> list[int]:
    """Colour refinement to the coarsest equitable partition.

    Colours are renumbered by sorted signature so the result depends only on
    the isomorphism type of the coloured graph.
    """
    n = len(adj)
    while True:
        sigs = []
        for v in range(n):
            nb = sorted(colors[w] for w in _bits(adj[v]))
            sigs.append((colors[v], tuple(nb)))
        order = sorted(set(sigs))
        rank = {s: i for i, s in enumerate(order)}
        new = [rank[s] for s in sigs]
        if len(order) == len(set(colors)):
            return new
        colors = new


def _code_for(adj: Sequence[int], order: Sequence[int], tags: Sequence[int]) -> tuple:
    pos = {v: i for i, v in enumerate(order)}
    rows = []
    for v in order:
        row = 0
        for w in _bits(adj[v]):
            row |= 1 << pos[w]
        rows.append(row)
    return (tuple(tags[v] for v in order), tuple(rows))


def _canon_search(adj: Sequence[int], colors: list[int], tags: Sequence[int], budget: list[int]) -> tuple:
    colors = _refine(adj, colors)
    n = len(adj)
    cells: dict[int, list[int]] = {}
    for v in range(n):
        cells.setdefault(colors[v], []).append(v)
    if len(cells) == n:
        order = sorted(range(n), key=lambda v: colors[v])
        return _code_for(adj, order, tags)
    budget[0] -= 1
    if budget[0] < 0:
        raise ResourceError("canonical code search exceeded its budget")
    target = min((c for c, vs in cells.items() if len(vs) > 1), key=lambda c: (len(cells[c]), c))
    cell = cells[target]
    # twins inside one cell are interchangeable by an automorphism
    picks: list[int] = []
    for v in cell:
        if not any((adj[u] & ~(1 << v)) == (adj[v] & ~(1 << u)) for u in picks):
            picks.append(v)
    best = None
    for v in picks:
        split = [2 * c for c in colors]
        split[v] -= 1
        code = _canon_search(adj, split, tags, budget)
        if best is None or code < best:
            best = code
    return best


def canonical_form(bg: BoundariedGraph) -> tuple:
    g = bg.graph
    if g.n > CANON_CAP:
        raise ResourceError(f"canonical code limited to {CANON_CAP} vertices")
    tags = [0] * g.n
    for v, lab in bg.boundary:
        tags[v] = lab
    colors = list(tags)
    budget = [200_000]
    code = _canon_search(g.adj, colors, tags, budget) if g.n else ((), ())
    return (g.n, code)


def canonical_code(bg) -> bytes:
    """Byte string equal for two inputs iff they are isomorphic fixing labels."""
    if isinstance(bg, Graph):
        bg = unlabeled(bg)
    n, (tags, rows) = canonical_form(bg)
    width = max(1, (n + 7) // 8)
    out = bytearray(n.to_bytes(2, "big"))
    for t in tags:
        out += t.to_bytes(2, "big")
    for r in rows:
        out += r.to_bytes(width, "big")
    return bytes(out)


def relabel(bg: BoundariedGraph, perm: Sequence[int]) -> BoundariedGraph:
    """Rename vertex ``v`` to ``perm[v]``."""
    edges = tuple(sorted(tuple(sorted((perm[u], perm[v]))) for u, v in bg.graph.edges))
    bd = tuple(sorted(((perm[v], lab) for v, lab in bg.boundary), key=lambda p: p[1]))
    return BoundariedGraph(Graph(bg.n, edges), bd)


def graph_from_code(code: bytes) -> BoundariedGraph:
    """Inverse of :func:`canonical_code` up to isomorphism."""
    n = int.from_bytes(code[:2], "big")
    tags = [int.from_bytes(code[2 + 2 * i:4 + 2 * i], "big") for i in range(n)]
    width = max(1, (n + 7) // 8)
    base = 2 + 2 * n
    edges = []
    for i in range(n):
        row = int.from_bytes(code[base + i * width: base + (i + 1) * width], "big")
        for j in _bits(row):
            if i < j:
                edges.append((i, j))
    g = Graph(n, tuple(sorted(edges)))
    return BoundariedGraph(g, tuple(sorted(((v, t) for v, t in enumerate(tags) if t), key=lambda p: p[1])))
