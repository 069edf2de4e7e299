"""Minor and topological-minor containment for small patterns, rooted packings
and the class signature used to keep kernels inside an excluded-minor class.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import networkx as nx

from . import kernels
from .config import MINOR_HOST_CAP, MINOR_PATTERN_CAP, TRACE_CAP, step_budget
from .errors import InputError, ResourceError
from .graph import BoundariedGraph, Graph, bits, canonical_code, components, is_forest

# ------------------------------------------------------------------ helpers


class _Budget:
    __slots__ = ("left", "what")

    def __init__(self, steps: int | None, what: str):
        self.left = step_budget() if steps is None else steps
        self.what = what

    def tick(self, amount: int = 1) -> None:
        self.left -= amount
        if self.left < 0:
            raise ResourceError(f"{self.what}: step budget exhausted", partial=True)


def _compact(adj: Sequence[int], keep: int) -> list[int]:
    idx = bits(keep)
    pos = {v: i for i, v in enumerate(idx)}
    out = []
    for v in idx:
        m = 0
        for u in bits(adj[v] & keep):
            m |= 1 << pos[u]
        out.append(m)
    return out


def _contract(adj: Sequence[int], u: int, v: int) -> list[int]:
    a = list(adj)
    merged = (a[u] | a[v]) & ~(1 << u) & ~(1 << v)
    a[u] = merged
    for w in bits(merged):
        a[w] = (a[w] & ~(1 << v)) | (1 << u)
    keep = ((1 << len(a)) - 1) & ~(1 << v)
    return _compact(a, keep)


def _edge_count(adj: Sequence[int]) -> int:
    return sum(x.bit_count() for x in adj) // 2


def _embeds(adj: Sequence[int], f: Graph, alive: int | None = None) -> bool:
    """True iff ``f`` is a (not necessarily induced) subgraph of ``adj``."""
    n = len(adj)
    alive = (1 << n) - 1 if alive is None else alive
    if f.n == 0:
        return True
    if f.n > alive.bit_count():
        return False
    fadj = f.adj
    start = max(range(f.n), key=lambda u: (fadj[u].bit_count(), -u))
    order = [start]
    seen = 1 << start
    while len(order) < f.n:
        frontier = [u for u in range(f.n) if not seen >> u & 1 and any(fadj[u] >> w & 1 for w in order)]
        if not frontier:
            frontier = [u for u in range(f.n) if not seen >> u & 1]
        u = max(frontier, key=lambda x: ((fadj[x] & seen).bit_count(), fadj[x].bit_count(), -x))
        order.append(u)
        seen |= 1 << u
    fdeg = [fadj[u].bit_count() for u in range(f.n)]
    gdeg = [(adj[v] & alive).bit_count() if alive >> v & 1 else -1 for v in range(n)]
    back = [[w for w in order[:i] if fadj[order[i]] >> w & 1] for i in range(f.n)]
    image = [0] * f.n

    def rec(i: int, used: int) -> bool:
        if i == f.n:
            return True
        u = order[i]
        cand = alive & ~used
        for w in back[i]:
            cand &= adj[image[w]]
        need = fdeg[u]
        while cand:
            low = cand & -cand
            x = low.bit_length() - 1
            cand ^= low
            if gdeg[x] < need:
                continue
            image[u] = x
            if rec(i + 1, used | low):
                return True
        return False

    return rec(0, 0)


def contains_subgraph(g: Graph, f: Graph) -> bool:
    return _embeds(g.adj, f)


@lru_cache(maxsize=256)
def _pattern_facts(f: Graph) -> tuple[int, bool, bool, bool]:
    """(min degree, connected, 2-connected, planar)."""
    nxf = nx.Graph()
    nxf.add_nodes_from(range(f.n))
    nxf.add_edges_from(f.edges)
    delta = min((f.degree(v) for v in range(f.n)), default=0)
    conn = f.n > 0 and nx.is_connected(nxf)
    biconn = f.n >= 3 and nx.is_biconnected(nxf)
    planar, _ = nx.check_planarity(nxf)
    return delta, conn, biconn, planar


def _to_nx(adj: Sequence[int]) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(len(adj)))
    for v, m in enumerate(adj):
        for u in bits(m >> (v + 1) << (v + 1)):
            h.add_edge(v, u)
    return h


def _reduce(adj: list[int], delta: int) -> list[int]:
    """Drop vertices that no minimal model of a pattern with min degree ``delta`` needs."""
    changed = True
    while changed and adj:
        changed = False
        for v, m in enumerate(adj):
            d = m.bit_count()
            if (d == 0 and delta >= 1) or (d == 1 and delta >= 2):
                adj = _compact(adj, ((1 << len(adj)) - 1) & ~(1 << v))
                changed = True
                break
            if d == 2 and delta >= 3:
                a = (m & -m).bit_length() - 1
                adj = _contract(adj, a, v) if a < v else _contract(adj, v, a)
                changed = True
                break
    return adj


def _mader_forces(n: int, m: int, h: int) -> bool:
    # graphs above the extremal edge count for K_h minors (valid for h <= 7)
    if h > 7 or n < h - 1:
        return False
    return m > (h - 2) * n - (h - 1) * (h - 2) // 2


def _pieces(adj: list[int], connected: bool, biconnected: bool) -> list[list[int]]:
    if not connected:
        return [adj]
    n = len(adj)
    g = Graph(n, tuple((v, u) for v in range(n) for u in bits(adj[v]) if u > v))
    out = []
    for comp in components(g):
        if not biconnected:
            out.append(_compact(adj, comp))
            continue
        sub = _compact(adj, comp)
        if len(sub) < 3:
            continue
        for block in nx.biconnected_components(_to_nx(sub)):
            if len(block) >= 3:
                keep = 0
                for v in block:
                    keep |= 1 << v
                out.append(_compact(sub, keep))
    return out


def has_minor(g: Graph, f: Graph, budget: int | None = None) -> bool:
    """Whether ``f`` is a minor of ``g`` (exhaustive contraction search with pruning)."""
    if f.n > MINOR_PATTERN_CAP:
        raise ResourceError(f"minor patterns limited to {MINOR_PATTERN_CAP} vertices")
    if g.n > MINOR_HOST_CAP:
        raise ResourceError(f"minor hosts limited to {MINOR_HOST_CAP} vertices")
    if f.n == 0:
        return True
    if f.m == 0:
        return g.n >= f.n
    if g.n < f.n or g.m < f.m:
        return False
    delta, conn, biconn, planar = _pattern_facts(f)
    if f.n == 3 and f.m == 3:
        return not is_forest(g)
    if f.n == 2:
        return g.m > 0
    steps = _Budget(budget, "minor search")
    seen: set = set()
    for piece in _pieces(list(g.adj), conn, biconn):
        if _minor_search(_reduce(piece, delta), f, delta, planar, steps, seen):
            return True
    return False


def _minor_search(adj: list[int], f: Graph, delta: int, planar_f: bool, steps: _Budget, seen: set) -> bool:
    n = len(adj)
    if n < f.n:
        return False
    m = _edge_count(adj)
    if m < f.m:
        return False
    if _mader_forces(n, m, f.n):
        return True
    if not planar_f and nx.check_planarity(_to_nx(adj))[0]:
        return False
    key = canonical_code(Graph(n, tuple((v, u) for v in range(n) for u in bits(adj[v]) if u > v))) \
        if n <= 16 else tuple(adj)
    if key in seen:
        return False
    seen.add(key)
    steps.tick()
    if _embeds(adj, f):
        return True
    if n == f.n:
        return False
    for v in range(n):
        for u in bits(adj[v] >> (v + 1) << (v + 1)):
            nxt = _reduce(_contract(adj, v, u), delta)
            if _minor_search(nxt, f, delta, planar_f, steps, seen):
                return True
    return False


def minor_model_vertices(g: Graph, f: Graph) -> list[int] | None:
    """An inclusion-minimal vertex set whose induced graph still has ``f`` as a minor."""
    if not has_minor(g, f):
        return None
    keep = (1 << g.n) - 1
    for v in range(g.n):
        trial = keep & ~(1 << v)
        sub = _compact(list(g.adj), trial)
        sg = Graph(len(sub), tuple((a, b) for a in range(len(sub)) for b in bits(sub[a]) if b > a))
        if has_minor(sg, f):
            keep = trial
    return bits(keep)


# -------------------------------------------------------- topological minors

def has_topological_minor(g: Graph, f: Graph, budget: int | None = None) -> bool:
    """Whether a subdivision of ``f`` is a subgraph of ``g``."""
    if f.n > MINOR_PATTERN_CAP:
        raise ResourceError(f"minor patterns limited to {MINOR_PATTERN_CAP} vertices")
    if g.n > MINOR_HOST_CAP:
        raise ResourceError(f"minor hosts limited to {MINOR_HOST_CAP} vertices")
    if f.n == 0:
        return True
    if g.n < f.n or g.m < f.m:
        return False
    steps = _Budget(budget, "topological minor search")
    adj = g.adj
    fdeg = [f.degree(u) for u in range(f.n)]
    forder = sorted(range(f.n), key=lambda u: (-fdeg[u], u))
    fedges = list(f.edges)
    phi = [-1] * f.n

    def route(i: int, used: int) -> bool:
        if i == len(fedges):
            return True
        a, b = fedges[i]
        src, dst = phi[a], phi[b]

        def walk(x: int, used_now: int) -> bool:
            steps.tick()
            if adj[x] >> dst & 1 and route(i + 1, used_now):
                return True
            cand = adj[x] & ~used_now
            while cand:
                low = cand & -cand
                cand ^= low
                if walk(low.bit_length() - 1, used_now | low):
                    return True
            return False

        return walk(src, used)

    def place(j: int, used: int) -> bool:
        if j == f.n:
            return route(0, used)
        u = forder[j]
        cand = ((1 << g.n) - 1) & ~used
        while cand:
            low = cand & -cand
            x = low.bit_length() - 1
            cand ^= low
            if g.degree(x) < fdeg[u]:
                continue
            phi[u] = x
            if place(j + 1, used | low):
                return True
        phi[u] = -1
        return False

    return place(0, 0)


# ---------------------------------------------------------- rooted packings

@dataclass(frozen=True, order=True)
class RootedPacking:
    """Trace of a partial minor model of a pattern on a labelled boundary.

    ``packing`` holds disjoint label sets, ``rooting[i]`` is the pattern vertex
    whose model meets the boundary exactly in ``packing[i]``. ``chi`` lists the
    realized pattern edges among ``s_f``.
    """

    packing: tuple[tuple[int, ...], ...]
    rooting: tuple[int, ...]
    s_f_star: tuple[int, ...]
    s_f: tuple[int, ...]
    chi: tuple[tuple[int, int], ...]

    def key(self) -> list:
        return [[list(p) for p in self.packing], list(self.rooting), list(self.s_f_star),
                list(self.s_f), [list(e) for e in self.chi]]

    def is_valid(self, f: Graph) -> bool:
        flat = [lab for part in self.packing for lab in part]
        if len(flat) != len(set(flat)) or any(not part for part in self.packing):
            return False
        if set(self.rooting) != set(self.s_f) or not set(self.s_f) <= set(self.s_f_star):
            return False
        inside = set(self.s_f)
        return all(u in inside and v in inside and f.has_edge(u, v) for u, v in self.chi)


def _make_rp(parts: Sequence[tuple[tuple[int, ...], int]], star: Iterable[int], chi: Iterable[tuple[int, int]]) -> RootedPacking:
    parts = sorted(parts)
    return RootedPacking(
        tuple(p for p, _ in parts),
        tuple(u for _, u in parts),
        tuple(sorted(star)),
        tuple(sorted(set(u for _, u in parts))),
        tuple(sorted(chi)),
    )


def _set_partitions(items: Sequence[int]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [(first,)] + part
        for i in range(len(part)):
            yield part[:i] + [tuple(sorted((first,) + part[i]))] + part[i + 1:]


def enumerate_rooted_packings(labels: Iterable[int], f: Graph) -> list[RootedPacking]:
    """Every rooted packing of ``f`` over the label set, without duplicates."""
    labels = sorted(set(labels))
    r = f.n
    out = []
    for size in range(len(labels) + 1):
        for used in itertools.combinations(labels, size):
            for partition in _set_partitions(list(used)):
                partition = sorted(partition)
                k = len(partition)
                for sf_size in range(0, min(k, r) + 1):
                    if (k == 0) != (sf_size == 0):
                        continue
                    for s_f in itertools.combinations(range(r), sf_size):
                        inner_edges = [(u, v) for u, v in f.edges if u in s_f and v in s_f]
                        for psi in itertools.product(s_f, repeat=k):
                            if set(psi) != set(s_f):
                                continue
                            others = [u for u in range(r) if u not in s_f]
                            for extra_size in range(len(others) + 1):
                                for extra in itertools.combinations(others, extra_size):
                                    star = tuple(sorted(s_f + extra))
                                    for cs in range(len(inner_edges) + 1):
                                        for chi in itertools.combinations(inner_edges, cs):
                                            out.append(RootedPacking(tuple(partition), tuple(psi), star, s_f, chi))
    return out


def packing_bound(t: int, f: Graph) -> float:
    """2^(t log t) * r^t * 2^(r^2) with r = |V(F)|."""
    r = f.n
    tlogt = t * math.log2(t) if t > 1 else 0.0
    return 2.0 ** tlogt * float(r) ** t * 2.0 ** (r * r)


def _minimal_masks(masks: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for m in sorted(set(masks), key=lambda x: (x.bit_count(), x)):
        if not any(o & m == o for o in out):
            out.append(m)
    return tuple(out)


def _check_trace_size(n: int, h: int) -> None:
    if (h + 1) ** n > TRACE_CAP:
        raise ResourceError(f"partial-model enumeration for {n} vertices and a {h}-vertex pattern exceeds the cap")


def packing_traces(bg: BoundariedGraph, f: Graph) -> dict[RootedPacking, tuple[int, ...]]:
    """Every rooted packing realized in ``bg`` mapped to the minimal vertex
    masks of the partial models realizing it.

    A packing is present in ``bg - S`` iff one of its masks avoids ``S``.
    """
    g = bg.graph
    _check_trace_size(g.n, f.n)
    bmask = bg.boundary_mask
    label_of = bg.label_of
    grouped: dict = {}
    for used, key in kernels.block_partitions(g.n, list(g.adj), (1 << g.n) - 1, bmask, f.n):
        grouped.setdefault(key, []).append(used)
    out: dict[RootedPacking, set] = {}
    fedges = f.edges
    h = f.n
    for (descs, adjbits), masks in grouped.items():
        minimal = _minimal_masks(masks)
        m = len(descs)
        parts_of = [tuple(tuple(sorted(label_of[v] for v in bits(p))) for p in d) for d in descs]
        for image in itertools.permutations(range(h), m):
            where = {u: i for i, u in enumerate(image)}
            ok = True
            chi = []
            for u, v in fedges:
                if u not in where or v not in where:
                    continue
                i, j = where[u], where[v]
                a, b = (i, j) if i < j else (j, i)
                linked = bool(adjbits >> (a * h + b) & 1)
                if descs[i] and descs[j]:
                    if linked:
                        chi.append((u, v))
                elif not linked:
                    ok = False
                    break
            if not ok:
                continue
            parts = [(p, image[i]) for i in range(m) for p in parts_of[i]]
            rp = _make_rp(parts, image, chi)
            out.setdefault(rp, set()).update(minimal)
    out.setdefault(_make_rp([], (), ()), set()).add(0)
    return {rp: _minimal_masks(ms) for rp, ms in out.items()}


def packing_present(bg: BoundariedGraph, rp: RootedPacking, f: Graph) -> bool:
    if not set(lab for part in rp.packing for lab in part) <= set(bg.labels):
        raise InputError("rooted packing refers to labels outside the boundary")
    return rp in packing_traces(bg, f)


# ------------------------------------------------------- topological traces

def topological_traces(bg: BoundariedGraph, f: Graph, budget: int | None = None) -> frozenset:
    """Traces of partial subdivisions of ``f`` on the boundary of ``bg``.

    A trace records where branch vertices sit (interior or a boundary label)
    and the endpoint pairs of the path segments drawn inside ``bg``; segment
    endpoints are branch vertices or non-branch boundary vertices, interior
    vertices are used by at most one segment.
    """
    g = bg.graph
    n = g.n
    if n > 9:
        raise ResourceError("topological traces are limited to 9 vertices")
    steps = _Budget(budget, "topological trace enumeration")
    adj = g.adj
    bmask = bg.boundary_mask
    label_of = bg.label_of
    fdeg = [f.degree(u) for u in range(f.n)]
    traces: set = set()

    def paths_between(ports: int, free: int) -> list[tuple[int, int, int]]:
        found = []
        plist = bits(ports)
        for s in plist:
            def walk(x: int, inner: int):
                steps.tick()
                hits = adj[x] & ports & ~((1 << s) - 1) & ~(1 << s)
                for t in bits(hits):
                    if t != s and not (inner == 0 and x != s):
                        found.append((s, t, inner))
                cand = adj[x] & free & ~inner
                for y in bits(cand):
                    walk(y, inner | (1 << y))
            walk(s, 0)
        return found

    for placed in range(f.n + 1):
        for hv in itertools.combinations(range(f.n), placed):
            for spots in itertools.permutations(range(n), placed):
                ok = all(bmask >> x & 1 or g.degree(x) >= fdeg[u] for u, x in zip(hv, spots))
                if not ok:
                    continue
                branch = dict(zip(spots, hv))
                ports = bmask
                for x in spots:
                    ports |= 1 << x
                free = ((1 << n) - 1) & ~ports
                segs = paths_between(ports, free)

                def end(x: int):
                    return ("h", branch[x]) if x in branch else ("b", label_of[x])

                cap = {}
                for x in bits(ports):
                    cap[x] = fdeg[branch[x]] if x in branch else 2
                exact = {x for x in spots if not bmask >> x & 1}
                placement = tuple(sorted((u, label_of.get(x, 0)) for x, u in branch.items()))

                def rec(i: int, used: int, chosen: list, load: dict):
                    steps.tick()
                    if i == len(segs):
                        if all(load.get(x, 0) == cap[x] for x in exact):
                            pairs = tuple(sorted(tuple(sorted((end(a), end(b)))) for a, b in chosen))
                            traces.add((placement, pairs))
                        return
                    rec(i + 1, used, chosen, load)
                    a, b, inner = segs[i]
                    if inner & used or load.get(a, 0) >= cap[a] or load.get(b, 0) >= cap[b]:
                        return
                    if a in branch and b in branch:
                        if not f.has_edge(branch[a], branch[b]):
                            return
                        if any(x in branch and y in branch and {x, y} == {a, b} for x, y in chosen):
                            return
                    load[a] = load.get(a, 0) + 1
                    load[b] = load.get(b, 0) + 1
                    chosen.append((a, b))
                    rec(i + 1, used | inner, chosen, load)
                    chosen.pop()
                    load[a] -= 1
                    load[b] -= 1

                rec(0, 0, [], {})
    return frozenset(traces)


# ---------------------------------------------------------- class signature

@dataclass(frozen=True)
class ClassSignature:
    mode: str
    pattern: bytes
    items: frozenset

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.mode.encode())
        h.update(self.pattern)
        for item in sorted(repr(x) for x in self.items):
            h.update(item.encode())
            h.update(b"\n")
        return h.hexdigest()


def completable(rp: RootedPacking, f: Graph) -> bool:
    """False when a model piece avoiding the boundary misses a pattern
    neighbour; no gluing can then finish the model."""
    image = set(rp.s_f_star)
    inner = image - set(rp.s_f)
    return all(set(f.neighbors(u)) <= image for u in inner)


def class_signature(bg: BoundariedGraph, h: Graph, mode: str = "minor") -> ClassSignature:
    """Completable rooted packings (minor mode) or subdivision traces
    (topological mode) of ``h`` present in ``bg``."""
    if mode == "minor":
        items = frozenset(rp for rp in packing_traces(bg, h) if completable(rp, h))
    elif mode == "topological":
        items = topological_traces(bg, h)
    else:
        raise InputError(f"unknown exclusion mode {mode!r}")
    return ClassSignature(mode, canonical_code(h), items)
