"""Protrusion decompositions, protrusion search and representative splicing."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .config import step_budget
from .encoders import compute_table
from .errors import InputError, KernelError, RepositoryTooSmall, ResourceError, WidthBoundError
from .graph import (BoundariedGraph, Graph, attach_boundary, bits, build_graph, components, induced_boundaried,
                    induced_subgraph, mask_of, remove_vertices, unlabeled)
from .problems import Problem, parse_problem
from .repository import Repository, delta, width_for
from .treedec import (decomposition_from_order, elimination_order, exact_treewidth, make_nice,
                      rooted_width, subtree_vertices, treewidth_at_most)

EXACT_ORDER_CAP = 16


# -------------------------------------------------------------- modulators

def find_modulator(g: Graph, t: int, budget: int | None = None) -> list[int]:
    """A minimum vertex set ``X`` with ``tw(G - X) <= t``; the
    lexicographically first one among those of minimum size."""
    if g.n > 24:
        raise ResourceError("modulator search limited to 24 vertices")
    if t < 0:
        raise InputError("t must be non-negative")
    steps = step_budget() if budget is None else budget
    start = 0
    if t <= 1:
        # edgeless or forest after deletion: vertex cover / feedback vertex set
        fam = "K2" if t == 0 else "K3"
        start = parse_problem(f"fdel:F={fam}").solve(g)
    for size in range(start, g.n + 1):
        for xs in itertools.combinations(range(g.n), size):
            steps -= 1
            if steps < 0:
                raise ResourceError("modulator search exceeded its step budget", partial=True)
            rest, _ = remove_vertices(g, xs)
            if treewidth_at_most(rest, t):
                return list(xs)
    return list(range(g.n))


def read_modulator(text: str, n: int) -> list[int]:
    """Parse a modulator file: one vertex id per line, blank lines ignored."""
    out = []
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln:
            continue
        try:
            v = int(ln)
        except ValueError:
            raise InputError(f"bad modulator line {ln!r}") from None
        if not 0 <= v < n:
            raise InputError(f"modulator vertex {v} outside 0..{n - 1}")
        out.append(v)
    if len(set(out)) != len(out):
        raise InputError("modulator lists a vertex twice")
    return sorted(out)


# ------------------------------------------------------ protrusion decompositions

def closed_neighborhood_mask(g: Graph, mask: int) -> int:
    nb = 0
    for v in bits(mask):
        nb |= g.adj[v]
    return nb | mask


def boundary_of(g: Graph, w: Iterable[int]) -> list[int]:
    """Vertices of ``w`` with a neighbour outside ``w``."""
    wm = mask_of(w)
    return [v for v in bits(wm) if g.adj[v] & ~wm]


@dataclass
class ProtrusionDecomposition:
    y0: frozenset
    parts: tuple[frozenset, ...]
    alpha: int
    t: int

    @property
    def ell(self) -> int:
        return len(self.parts)

    def protrusion(self, g: Graph, i: int) -> frozenset:
        yi = self.parts[i]
        nb = closed_neighborhood_mask(g, mask_of(yi)) & mask_of(self.y0)
        return frozenset(yi | set(bits(nb)))


@dataclass(frozen=True)
class DecompositionCheck:
    ok: bool
    clause: str = ""
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def protrusion_parameter(g: Graph, w: Iterable[int]) -> int:
    """Least ``t`` for which ``w`` is a t-protrusion (with the width floor)."""
    w = list(w)
    sub, _ = induced_subgraph(g, w)
    return max(len(boundary_of(g, w)), exact_treewidth(sub) + 1)


def _tree_decomposition(g: Graph):
    bg = unlabeled(g)
    exact = g.n <= EXACT_ORDER_CAP
    _, order = elimination_order(bg, exact=exact)
    return make_nice(decomposition_from_order(g, 0, order))


def build_protrusion_decomposition(g: Graph, modulator: Iterable[int], t: int,
                                   threshold: int | None = None) -> ProtrusionDecomposition:
    """Decompose around the modulator ``X`` (with ``tw(G - X) <= t``).

    Nodes of a decomposition of ``G - X`` are visited bottom-up; a node is
    marked when the not yet separated vertices below it see more than
    ``threshold`` (default ``t``) vertices of ``X``. Marks are closed under
    lowest common ancestors, marked bags and ``X`` form ``Y0``, and the
    components of ``G - Y0`` grouped by their neighbourhood in ``Y0`` are the
    parts. The result is validated before it is returned.
    """
    x = sorted(set(modulator))
    xm = mask_of(x)
    limit = t if threshold is None else threshold
    rest, vmap = remove_vertices(g, x)
    if not treewidth_at_most(rest, t):
        raise InputError(f"G - X has treewidth above {t}")
    back = {new: old for old, new in vmap.items()}
    td = _tree_decomposition(rest)
    kids = td.children()
    order = td.postorder()
    marked = [False] * len(td.bags)
    pending = [0] * len(td.bags)
    for node in order:
        pend = mask_of(back[v] for v in td.bags[node])
        for c in kids[node]:
            pend |= pending[c]
        seen_x = 0
        for v in bits(pend):
            seen_x |= g.adj[v] & xm
        if seen_x.bit_count() > limit:
            marked[node] = True
            pend = 0
        pending[node] = pend
    holds = [False] * len(td.bags)
    for node in order:
        below = sum(1 for c in kids[node] if holds[c])
        if below >= 2:
            marked[node] = True
        holds[node] = marked[node] or below > 0
    y0 = set(x)
    for node, bag in enumerate(td.bags):
        if marked[node]:
            y0.update(back[v] for v in bag)
    y0m = mask_of(y0)
    full = (1 << g.n) - 1
    groups: dict[int, set] = {}
    for comp in components(g, full & ~y0m):
        nb = closed_neighborhood_mask(g, comp) & y0m
        groups.setdefault(nb, set()).update(bits(comp))
    parts = tuple(frozenset(groups[k]) for k in sorted(groups, key=lambda k: min(groups[k])))
    pd = ProtrusionDecomposition(frozenset(y0), parts, 0, 0)
    tt = max((protrusion_parameter(g, pd.protrusion(g, i)) for i in range(len(parts))), default=0)
    pd.alpha = max(len(parts), len(y0))
    pd.t = tt
    check = validate_protrusion_decomposition(g, pd)
    if not check:
        raise KernelError(f"protrusion decomposition failed clause {check.clause}: {check.detail}")
    return pd


def validate_protrusion_decomposition(g: Graph, pd: ProtrusionDecomposition,
                                      alpha: int | None = None, t: int | None = None) -> DecompositionCheck:
    alpha = pd.alpha if alpha is None else alpha
    t = pd.t if t is None else t
    seen: set = set(pd.y0)
    if len(seen) != len(pd.y0):
        return DecompositionCheck(False, "partition", "repeated vertex in Y0")
    for i, yi in enumerate(pd.parts):
        if not yi:
            return DecompositionCheck(False, "partition", f"part {i + 1} is empty")
        if seen & yi:
            return DecompositionCheck(False, "partition", f"part {i + 1} overlaps an earlier part")
        seen |= yi
    if seen != set(range(g.n)):
        return DecompositionCheck(False, "partition", "parts do not cover every vertex")
    y0m = mask_of(pd.y0)
    for i, yi in enumerate(pd.parts):
        ym = mask_of(yi)
        nb = closed_neighborhood_mask(g, ym) & ~ym
        if nb & ~y0m:
            return DecompositionCheck(False, "i", f"part {i + 1} has a neighbour outside Y0")
    if max(len(pd.parts), len(pd.y0)) > alpha:
        return DecompositionCheck(False, "ii", f"max(l, |Y0|) exceeds alpha={alpha}")
    for i in range(len(pd.parts)):
        w = pd.protrusion(g, i)
        if len(boundary_of(g, w)) > t:
            return DecompositionCheck(False, "iii", f"part {i + 1} has more than {t} boundary vertices")
        sub, _ = induced_subgraph(g, w)
        if not treewidth_at_most(sub, max(t - 1, 0)):
            return DecompositionCheck(False, "iii", f"part {i + 1} has treewidth above {t - 1}")
    return DecompositionCheck(True)


# ------------------------------------------------------------ protrusion search

@dataclass(frozen=True)
class Protrusion:
    vertices: frozenset
    boundary: tuple[int, ...]
    width: int


def find_large_protrusion(g: Graph, t: int, x: int, width: int | None = None,
                          skip: Iterable[frozenset] = (), budget: int | None = None) -> Protrusion | None:
    """First ``W`` (in a fixed scan order) with ``|W| > x``, at most ``t``
    boundary vertices and ``tw(G[W]) <= width``.

    Boundaries ``B`` are scanned by size then lexicographically; for each, the
    components of ``G - B`` are tried one by one and then greedily merged.
    """
    w = width_for(t) if width is None else width
    skip = set(skip)
    steps = step_budget() if budget is None else budget
    if x >= g.n:
        return None
    full = (1 << g.n) - 1
    for size in range(t + 1):
        for bset in itertools.combinations(range(g.n), size):
            bm = mask_of(bset)
            comps = components(g, full & ~bm)
            good = []
            for comp in comps:
                steps -= 1
                if steps < 0:
                    raise ResourceError("protrusion scan exceeded its step budget", partial=True)
                wm = comp | (closed_neighborhood_mask(g, comp) & bm)
                sub, _ = induced_subgraph(g, bits(wm))
                if treewidth_at_most(sub, w):
                    good.append(wm)
            unions = list(good)
            acc = 0
            for wm in good:
                trial = acc | wm
                sub, _ = induced_subgraph(g, bits(trial))
                if treewidth_at_most(sub, w):
                    acc = trial
            if acc:
                unions.append(acc)
            for wm in unions:
                verts = frozenset(bits(wm))
                if len(verts) > x and verts not in skip:
                    return Protrusion(verts, tuple(boundary_of(g, verts)), w)
    return None


# ----------------------------------------------------------------- splicing

@dataclass
class Splice:
    size: int
    boundary: int
    rep_key: str
    rep_size: int
    delta: int

    def as_dict(self) -> dict:
        return {"size": self.size, "boundary": self.boundary, "rep": self.rep_key[:16],
                "rep_size": self.rep_size, "delta": self.delta}


@dataclass
class Skip:
    size: int
    reason: str

    def as_dict(self) -> dict:
        return {"size": self.size, "skipped": self.reason}


def splice(g: Graph, piece: Sequence[int], boundary: Sequence[int], rep: BoundariedGraph) -> tuple[Graph, dict[int, int]]:
    """Replace ``G[piece]`` (boundary listed in label order) by ``rep``.

    Returns the new graph and the map from surviving old ids to new ids;
    the representative's interior vertices are appended at the end. Edges
    between boundary vertices are kept.
    """
    interior = set(piece) - set(boundary)
    rest, vmap = remove_vertices(g, interior)
    base = rest.n
    where = {}
    for v in range(rep.n):
        lab = rep.label_of.get(v)
        if lab is not None:
            where[v] = vmap[boundary[lab - 1]]
        else:
            where[v] = base
            base += 1
    edges = list(rest.edges) + [(where[u], where[v]) for u, v in rep.graph.edges]
    return build_graph(base, edges), vmap


def _rooted_pieces(g: Graph, w: Sequence[int], limit: int) -> list[tuple[frozenset, tuple[int, ...]]]:
    """Candidate pieces of ``G[W]``: for nodes of a decomposition rooted at
    the boundary of ``W``, the vertices below the node and their boundary
    towards the rest of ``G``. Lowest nodes first."""
    bd = boundary_of(g, w)
    bg, vmap = induced_boundaried(g, w, bd)
    back = {new: old for old, new in vmap.items()}
    free = bg.n - len(bd)
    try:
        _, order = elimination_order(bg, exact=free <= EXACT_ORDER_CAP)
    except WidthBoundError:
        return []
    td = make_nice(decomposition_from_order(bg.graph, bg.boundary_mask, order))
    below = subtree_vertices(td)
    seen = set()
    out = []
    for node in td.postorder():
        verts = frozenset(back[v] for v in below[node])
        if len(verts) > limit or verts in seen:
            continue
        seen.add(verts)
        out.append((verts, tuple(boundary_of(g, verts))))
    return out


def replace_protrusion(g: Graph, k: int, w: Iterable[int], repo: Repository, strict: bool = False,
                       tracked: dict[int, int] | None = None):
    """Shrink the protrusion ``W`` by splicing in repository representatives.

    Pieces are the vertex sets below the nodes of a decomposition of
    ``G[W]`` rooted at its boundary. The lowest piece with more than ``b``
    vertices, at most ``t`` boundary vertices and a decomposition of the
    repository's width rooted at that boundary is replaced by its
    representative; the process restarts on the shrunken protrusion until no
    piece qualifies.

    Returns ``(G', k', log, W')``. ``tracked`` maps caller ids to current
    ids and is updated in place.
    """
    b, t = repo.b, repo.t
    wset = set(w)
    log: list = []
    tried: set = set()
    while len(wset) > b:
        done = False
        for piece, bd in _rooted_pieces(g, sorted(wset), 2 * b + 1):
            if len(piece) <= b or len(bd) > t or piece in tried:
                continue
            tried.add(piece)
            bg, _ = induced_boundaried(g, piece, bd)
            try:
                if rooted_width(bg) > repo.width:
                    log.append(Skip(len(piece), "width"))
                    continue
                table = compute_table(bg, repo.encoder)
                key = repo.key_of(bg, table)
            except ResourceError as exc:
                log.append(Skip(len(piece), f"resource: {exc}"))
                continue
            bucket = repo.buckets.get(key)
            if bucket is None:
                if strict:
                    raise RepositoryTooSmall(
                        f"no representative for a {len(piece)}-vertex piece with {len(bd)} boundary vertices; "
                        f"raise the size bound (currently {b})", bg)
                log.append(Skip(len(piece), "absent key"))
                continue
            d = delta(bucket.table, table)
            if d > 0 or bucket.rep.n >= len(piece):
                log.append(Skip(len(piece), f"not progressive (delta={d})"))
                continue
            g2, vmap = splice(g, sorted(piece), bd, bucket.rep)
            new_ids = range(g2.n - (bucket.rep.n - len(bd)), g2.n)
            wset = {vmap[v] for v in wset if v in vmap} | set(new_ids)
            if tracked is not None:
                for key_, cur in list(tracked.items()):
                    if cur in vmap:
                        tracked[key_] = vmap[cur]
                    else:
                        del tracked[key_]
            tried = {frozenset(vmap[v] for v in p) for p in tried if all(v in vmap for v in p)}
            g = g2
            k += d
            log.append(Splice(len(piece), len(bd), key, bucket.rep.n, d))
            done = True
            break
        if not done:
            break
    return g, k, log, wset


# ------------------------------------------------------------------ pipeline

@dataclass
class KernelReport:
    mode: str
    problem: str
    input_n: int
    input_m: int
    k: int
    graph: Graph
    k_out: int
    log: list = field(default_factory=list)
    alpha: int | None = None
    t: int | None = None
    ell: int | None = None
    modulator: list | None = None

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "problem": self.problem,
            "input": {"n": self.input_n, "m": self.input_m, "k": self.k},
            "output": {"n": self.graph.n, "m": self.graph.m, "k": self.k_out},
            "decomposition": {"alpha": self.alpha, "t": self.t, "ell": self.ell, "modulator": self.modulator},
            "replacements": [e.as_dict() for e in self.log],
        }


def kernelize(g: Graph, k: int, repo: Repository, mode: str = "modulator",
              modulator: Sequence[int] | None = None, strict: bool = False) -> KernelReport:
    """Equivalent instance ``(G', k')`` with ``k' <= k`` and ``|V(G')| <= |V(G)|``."""
    if mode not in ("modulator", "greedy"):
        raise InputError(f"unknown pipeline mode {mode!r}")
    report = KernelReport(mode, repo.problem.spec, g.n, g.m, k, g, k)
    if mode == "greedy":
        if modulator is not None:
            raise InputError("greedy mode does not take a modulator")
        skip: set = set()
        while True:
            p = find_large_protrusion(g, repo.t, repo.b, repo.width, skip)
            if p is None:
                break
            before = g.n
            g, k, log, _ = replace_protrusion(g, k, p.vertices, repo, strict)
            report.log += log
            if g.n == before:
                skip.add(p.vertices)
            else:
                skip = set()
        report.graph, report.k_out = g, k
        return report
    g0 = g
    xs = sorted(set(modulator)) if modulator is not None else find_modulator(g, repo.width)
    rest, _ = remove_vertices(g, xs)
    pd = build_protrusion_decomposition(g, xs, max(repo.width, exact_treewidth(rest)))
    report.alpha, report.t, report.ell, report.modulator = pd.alpha, pd.t, pd.ell, xs
    tracked = {v: v for v in range(g.n)}
    for i in range(pd.ell):
        w = [tracked[v] for v in sorted(pd.protrusion(g0, i)) if v in tracked]
        if len(w) <= repo.b:
            continue
        g, k, log, _ = replace_protrusion(g, k, w, repo, strict, tracked)
        report.log += log
    report.graph, report.k_out = g, k
    return report
