"""Exact treewidth, rooted nice tree decompositions and their validation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import kernels
from .config import TREEWIDTH_CAP
from .errors import ResourceError, WidthBoundError
from .graph import BoundariedGraph, Graph, bits, components, is_forest, mask_of


@dataclass(frozen=True)
class TreeDecomposition:
    """Rooted tree of bags; ``parent[root] == -1``."""

    bags: tuple[frozenset, ...]
    parent: tuple[int, ...]
    root: int

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def children(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.bags]
        for x, p in enumerate(self.parent):
            if p >= 0:
                out[p].append(x)
        return out

    def postorder(self) -> list[int]:
        kids = self.children()
        order: list[int] = []
        stack = [(self.root, False)]
        while stack:
            x, done = stack.pop()
            if done:
                order.append(x)
                continue
            stack.append((x, True))
            for c in reversed(kids[x]):
                stack.append((c, False))
        return order


@dataclass(frozen=True)
class NiceTreeDecomposition(TreeDecomposition):
    kinds: tuple[str, ...] = ()


@dataclass(frozen=True)
class Validation:
    ok: bool
    condition: str = ""
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise ResourceError(f"exact treewidth limited to {cap} vertices, got {n}")


def _min_degree_width(n: int, adj: Sequence[int], candidates: int) -> int:
    """Width of the greedy min-degree elimination of ``candidates``."""
    a = list(adj)
    alive = candidates
    width = 0
    while alive:
        v = min(bits(alive), key=lambda x: (a[x] & alive).bit_count())
        nb = a[v] & alive & ~(1 << v)
        width = max(width, nb.bit_count())
        for u in bits(nb):
            a[u] |= nb & ~(1 << u)
        alive &= ~(1 << v)
    return width


def exact_treewidth(g: Graph, cap: int = TREEWIDTH_CAP) -> int:
    """Treewidth of ``g`` (0 for the null graph)."""
    if g.n == 0:
        return 0
    if is_forest(g):
        return 1 if g.m else 0
    core_adj, core = _sp_core(g)
    if not core:
        return 2
    best = 3
    for comp in components(Graph(g.n, tuple((u, v) for v in bits(core) for u in bits(core_adj[v] & core) if u < v)), core):
        size = comp.bit_count()
        if size <= best + 1:
            continue
        verts = bits(comp)
        index = {v: i for i, v in enumerate(verts)}
        adj = [mask_of(index[u] for u in bits(core_adj[v] & comp)) for v in verts]
        ub = _min_degree_width(size, adj, (1 << size) - 1)
        if ub <= best:
            continue
        _check_cap(size, cap)
        w, _ = kernels.treewidth_dp(size, adj, 0, ub)
        best = max(best, ub if w < 0 else w)
    return best


def _sp_core(g: Graph) -> tuple[list[int], int]:
    """Strip degree <= 1 vertices and suppress degree-2 vertices. Both rules
    keep the treewidth once it is at least 2; returns the reduced adjacency
    and the mask of surviving vertices."""
    adj = list(g.adj)
    alive = (1 << g.n) - 1
    stack = list(range(g.n))
    while stack:
        v = stack.pop()
        if not alive >> v & 1:
            continue
        nb = adj[v] & alive
        d = nb.bit_count()
        if d > 2:
            continue
        alive &= ~(1 << v)
        ends = bits(nb)
        if d == 2:
            a, b = ends
            adj[a] |= 1 << b
            adj[b] |= 1 << a
        stack.extend(ends)
    return adj, alive


def _series_parallel(g: Graph) -> bool:
    """Treewidth <= 2 iff the series-parallel reductions empty the graph."""
    return _sp_core(g)[1] == 0


def treewidth_at_most(g: Graph, bound: int, cap: int = TREEWIDTH_CAP) -> bool:
    if bound <= 0:
        return g.m == 0
    if bound == 1:
        return is_forest(g)
    if bound == 2:
        return _series_parallel(g)
    if g.n <= bound + 1:
        return True
    for comp in components(g):
        size = comp.bit_count()
        if size <= bound + 1:
            continue
        verts = bits(comp)
        index = {v: i for i, v in enumerate(verts)}
        adj = [mask_of(index[u] for u in bits(g.adj[v] & comp)) for v in verts]
        if _min_degree_width(size, adj, (1 << size) - 1) <= bound:
            continue
        _check_cap(size, cap)
        w, _ = kernels.treewidth_dp(size, adj, 0, bound + 1)
        if w < 0:
            return False
    return True


def _with_clique(g: Graph, root_mask: int) -> list[int]:
    adj = list(g.adj)
    for v in bits(root_mask):
        adj[v] |= root_mask & ~(1 << v)
    return adj


def rooted_width(bg: BoundariedGraph, cap: int = TREEWIDTH_CAP) -> int:
    """Least width of a decomposition whose root bag holds the boundary."""
    g = bg.graph
    _check_cap(g.n, cap)
    root = bg.boundary_mask
    w, _ = kernels.treewidth_dp(g.n, _with_clique(g, root), root, g.n + 1)
    return w


def elimination_order(bg: BoundariedGraph, width_bound: int | None = None, exact: bool = True,
                      cap: int = TREEWIDTH_CAP) -> tuple[int, list[int]]:
    """Elimination order of the non-boundary vertices, boundary left for last.

    Returns ``(width, order)``. With ``exact`` the order is optimal;
    otherwise a greedy min-fill order is used.
    """
    g = bg.graph
    root = bg.boundary_mask
    adj = _with_clique(g, root)
    if not exact:
        return _greedy_order(g.n, adj, root)
    _check_cap(g.n - root.bit_count(), cap)
    ub = g.n + 1 if width_bound is None else width_bound + 1
    w, order = kernels.treewidth_dp(g.n, adj, root, ub)
    if w < 0:
        w2, _ = kernels.treewidth_dp(g.n, adj, root, g.n + 1)
        raise WidthBoundError(width_bound if width_bound is not None else -1, w2)
    return w, order


def _greedy_order(n: int, adj: Sequence[int], root: int) -> tuple[int, list[int]]:
    a = list(adj)
    alive = ((1 << n) - 1) & ~root
    order = []
    width = max(root.bit_count() - 1, 0)
    while alive:
        everyone = alive | root

        def fill(x: int) -> int:
            nb = a[x] & everyone
            missing = 0
            for u in bits(nb):
                missing += (nb & ~a[u] & ~(1 << u)).bit_count()
            return missing

        v = min(bits(alive), key=lambda x: (fill(x), (a[x] & everyone).bit_count(), x))
        nb = a[v] & everyone & ~(1 << v)
        width = max(width, nb.bit_count())
        for u in bits(nb):
            a[u] |= nb & ~(1 << u)
        alive &= ~(1 << v)
        order.append(v)
    return width, order


def decomposition_from_order(g: Graph, root_mask: int, order: Sequence[int]) -> TreeDecomposition:
    """Tree decomposition whose root bag is exactly ``root_mask``."""
    adj = list(_with_clique(g, root_mask))
    pos = {v: i for i, v in enumerate(order)}
    bags = []
    higher_of = []
    for v in order:
        later = 0
        for u in bits(adj[v]):
            if u not in pos or pos[u] > pos[v]:
                later |= 1 << u
        for u in bits(later):
            adj[u] |= later & ~(1 << u)
        bags.append(frozenset(bits(later | (1 << v))))
        higher_of.append(later)
    m = len(order)
    parent = []
    for i, v in enumerate(order):
        later = higher_of[i]
        free_later = [u for u in bits(later) if u in pos]
        if free_later:
            parent.append(pos[min(free_later, key=lambda u: pos[u])])
        else:
            parent.append(m)
    bags.append(frozenset(bits(root_mask)))
    parent.append(-1)
    return TreeDecomposition(tuple(bags), tuple(parent), m)


def make_nice(td: TreeDecomposition) -> NiceTreeDecomposition:
    """Leaf / introduce / forget / join normal form with empty leaves.

    Node ids are assigned in post-order, so the root is the last node.
    """
    kids = td.children()
    bags: list[frozenset] = []
    kinds: list[str] = []
    parent: list[int] = []

    def new(bag: frozenset, kind: str, below: Iterable[int]) -> int:
        x = len(bags)
        bags.append(bag)
        kinds.append(kind)
        parent.append(-1)
        for c in below:
            parent[c] = x
        return x

    def chain(x: int, have: frozenset, want: frozenset) -> int:
        cur = set(have)
        for v in sorted(have - want):
            cur.discard(v)
            x = new(frozenset(cur), "forget", [x])
        for v in sorted(want - have):
            cur.add(v)
            x = new(frozenset(cur), "introduce", [x])
        return x

    # iterative post-order build
    built: dict[int, int] = {}
    for node in td.postorder():
        bag = td.bags[node]
        tops = [chain(built[c], td.bags[c], bag) for c in kids[node]]
        if not tops:
            leaf = new(frozenset(), "leaf", [])
            tops = [chain(leaf, frozenset(), bag)]
        while len(tops) > 1:
            merged = []
            for i in range(0, len(tops) - 1, 2):
                merged.append(new(bag, "join", [tops[i], tops[i + 1]]))
            if len(tops) % 2:
                merged.append(tops[-1])
            tops = merged
        built[node] = tops[0]
    root = built[td.root]
    return NiceTreeDecomposition(tuple(bags), tuple(parent), root, tuple(kinds))


def rooted_nice_decomposition(bg: BoundariedGraph, width_bound: int, exact: bool = True) -> NiceTreeDecomposition:
    """Nice decomposition of width at most ``width_bound`` with the boundary as root bag.

    Raises :class:`WidthBoundError` carrying the true minimum when the bound
    cannot be met.
    """
    w, order = elimination_order(bg, width_bound, exact=exact)
    if w > width_bound:
        raise WidthBoundError(width_bound, w)
    td = decomposition_from_order(bg.graph, bg.boundary_mask, order)
    return make_nice(td)


def validate_decomposition(g: Graph, td: TreeDecomposition) -> Validation:
    nodes = len(td.bags)
    if len(td.parent) != nodes or not 0 <= td.root < nodes or td.parent[td.root] != -1:
        return Validation(False, "tree", "malformed root or parent table")
    kids = td.children()
    seen = set()
    stack = [td.root]
    while stack:
        x = stack.pop()
        if x in seen:
            return Validation(False, "tree", "cycle in parent table")
        seen.add(x)
        stack.extend(kids[x])
    if len(seen) != nodes:
        return Validation(False, "tree", "nodes unreachable from the root")
    covered = set().union(*td.bags) if td.bags else set()
    for v in range(g.n):
        if v not in covered:
            return Validation(False, "i", f"vertex {v} in no bag")
    for u, v in g.edges:
        if not any(u in b and v in b for b in td.bags):
            return Validation(False, "ii", f"edge ({u},{v}) in no bag")
    for v in range(g.n):
        holders = [x for x in range(nodes) if v in td.bags[x]]
        # connected iff exactly one holder has its parent outside the set
        tops = [x for x in holders if td.parent[x] < 0 or v not in td.bags[td.parent[x]]]
        if len(tops) != 1:
            return Validation(False, "iii", f"bags holding {v} are not connected")
    return Validation(True)


def validate_nice(td: NiceTreeDecomposition, root_bag: Iterable[int] = ()) -> Validation:
    kids = td.children()
    for x, kind in enumerate(td.kinds):
        bag = td.bags[x]
        c = kids[x]
        if kind == "leaf":
            ok = not c and not bag
        elif kind == "introduce":
            ok = len(c) == 1 and td.bags[c[0]] < bag and len(bag - td.bags[c[0]]) == 1
        elif kind == "forget":
            ok = len(c) == 1 and bag < td.bags[c[0]] and len(td.bags[c[0]] - bag) == 1
        elif kind == "join":
            ok = len(c) == 2 and td.bags[c[0]] == bag == td.bags[c[1]]
        else:
            ok = False
        if not ok:
            return Validation(False, "kind", f"node {x} does not conform to {kind}")
    if not set(root_bag) <= td.bags[td.root]:
        return Validation(False, "root", "boundary not inside the root bag")
    return Validation(True)


def dump_decomposition(td: TreeDecomposition) -> str:
    kinds = getattr(td, "kinds", ()) or ("node",) * len(td.bags)
    lines = []
    for x, bag in enumerate(td.bags):
        inner = ",".join(str(v) for v in sorted(bag))
        lines.append(f"{x} {td.parent[x]} {kinds[x]} {{{inner}}}")
    return "\n".join(lines) + "\n"


def subtree_vertices(td: TreeDecomposition) -> list[frozenset]:
    """For every node the set of vertices in the bags of its subtree."""
    kids = td.children()
    out: list[frozenset] = [frozenset()] * len(td.bags)
    for x in td.postorder():
        acc = set(td.bags[x])
        for c in kids[x]:
            acc |= out[c]
        out[x] = frozenset(acc)
    return out
