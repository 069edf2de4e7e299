"""Concrete encoders (r-domination, d-independence, F-deletion) and exact oracles."""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from . import kernels
from .catalog import FAMILY_NAMES, named_graph
from .config import MAX_FAMILY_VERTICES, MAX_RADIUS, ORACLE_CAP
from .encoders import MAX, MIN, Encoder, EncoderTable
from .errors import ConfigError, ResourceError
from .graph import BoundariedGraph, Graph, bits, canonical_code, is_connected, remove_vertices
from .minors import (_pattern_facts, enumerate_rooted_packings, has_minor, minor_model_vertices,
                     packing_traces)


def _distances(g: Graph) -> list[list[int]]:
    return kernels.bfs_all(g.n, list(g.adj))


def _balls(dist: list[list[int]], radius: int) -> list[int]:
    out = []
    for row in dist:
        m = 0
        for u, d in enumerate(row):
            if 0 <= d <= radius:
                m |= 1 << u
        out.append(m)
    return out


# ----------------------------------------------------------- r-domination

def symbol_name(code: int) -> str:
    if code == 0:
        return "0"
    i = (code + 1) // 2
    return f"v{i}" if code % 2 else f"^{i}"


class RdsEncoder(Encoder):
    """Per boundary vertex one of 0, down-i, up-i (i <= r), coded 0, 2i-1, 2i."""

    direction = MIN

    def __init__(self, r: int):
        if not 1 <= r <= MAX_RADIUS:
            raise ConfigError(f"radius must be in 1..{MAX_RADIUS}, got {r}")
        self.r = r
        self.name = f"rds:r={r}"

    def g(self, t: int) -> int:
        return t

    def iter_encodings(self, labels):
        return itertools.product(range(2 * self.r + 1), repeat=len(labels))

    def count(self, labels) -> int:
        return (2 * self.r + 1) ** len(labels)

    def canon(self, encoding):
        return list(encoding)

    def satisfies(self, bg, solution, encoding) -> bool:
        g = bg.graph
        s = set(solution)
        dist = _distances(g)
        r = self.r
        bverts = bg.boundary_vertices
        code = dict(zip(bverts, encoding))
        ups = [(w, c // 2) for w, c in code.items() if c and c % 2 == 0]

        def near_s(v: int, radius: int) -> bool:
            return any(0 <= dist[v][x] <= radius for x in s)

        def near_up(v: int, radius: int) -> bool:
            return any(dist[v][w] >= 0 and dist[v][w] + j <= radius for w, j in ups)

        for v in range(g.n):
            if v in code:
                c = code[v]
                if c == 0 and v not in s:
                    return False
                if c % 2 == 1:
                    i = (c + 1) // 2
                    if not (near_s(v, i) or near_up(v, i)):
                        return False
            elif not (near_s(v, r) or near_up(v, r)):
                return False
        return True

    def table(self, bg: BoundariedGraph) -> EncoderTable:
        g = bg.graph
        r = self.r
        dist = _distances(g)
        balls = [_balls(dist, rho) for rho in range(r + 1)]
        bverts = bg.boundary_vertices
        boundary = set(bverts)
        interior = [v for v in range(g.n) if v not in boundary]
        encs = list(self.iter_encodings(bg.labels))
        reqs = []
        for R in encs:
            zero = 0
            needs = [0] * (r + 1)
            ups = [(w, c // 2) for w, c in zip(bverts, R) if c and c % 2 == 0]
            for v in interior:
                if not any(dist[v][w] >= 0 and dist[v][w] + j <= r for w, j in ups):
                    needs[r] |= 1 << v
            for v, c in zip(bverts, R):
                if c == 0:
                    zero |= 1 << v
                elif c % 2 == 1:
                    i = (c + 1) // 2
                    if not any(dist[v][w] >= 0 and dist[v][w] + j <= i for w, j in ups):
                        needs[i] |= 1 << v
            reqs.append((zero, needs))
        best = kernels.ds_table(g.n, balls, reqs)
        entries = {R: b for R, b in zip(encs, best) if b >= 0}
        return EncoderTable(MIN, tuple(bg.labels), entries, False)


# --------------------------------------------------------- d-independence

class RisEncoder(Encoder):
    """Per boundary vertex a tuple (d_S, d_w1, ..., d_ws) over 0..d+1, where
    d+1 stands for "more than d"."""

    direction = MAX

    def __init__(self, d: int, table_limit: int = 200_000):
        if not 1 <= d <= 2 * MAX_RADIUS:
            raise ConfigError(f"independence distance must be in 1..{2 * MAX_RADIUS}, got {d}")
        self.d = d
        self.name = f"ris:d={d}"
        self.table_limit = table_limit

    def g(self, t: int) -> int:
        return 2 * t

    def iter_encodings(self, labels):
        s = len(labels)
        per = list(itertools.product(range(self.d + 2), repeat=s + 1))
        return itertools.product(per, repeat=s)

    def count(self, labels) -> int:
        s = len(labels)
        return (self.d + 2) ** (s * (s + 1))

    def canon(self, encoding):
        return [list(x) for x in encoding]

    def satisfies(self, bg, solution, encoding) -> bool:
        g = bg.graph
        s = list(solution)
        dist = _distances(g)
        cap = self.d + 1

        def capped(x: int) -> int:
            return cap if x < 0 else min(x, cap)

        for a, b in itertools.combinations(s, 2):
            if 0 <= dist[a][b] <= self.d:
                return False
        bverts = bg.boundary_vertices
        for v, row in zip(bverts, encoding):
            ds = min((capped(dist[v][x]) for x in s), default=cap)
            if ds < row[0]:
                return False
            for w, want in zip(bverts, row[1:]):
                if capped(dist[v][w]) < want:
                    return False
        return True

    def table(self, bg: BoundariedGraph) -> EncoderTable:
        labels = tuple(bg.labels)
        s = len(labels)
        if self.count(labels) > self.table_limit:
            raise ResourceError(f"{self.name}: {self.count(labels)} encodings exceed the table limit")
        g = bg.graph
        d = self.d
        cap = d + 1
        base = cap + 1
        dist = _distances(g)
        conflict = _balls(dist, d)
        bverts = bg.boundary_vertices
        bdist = [[cap if x < 0 else min(x, cap) for x in dist[v]] for v in bverts]
        best = kernels.independent_profiles(g.n, conflict, bdist, cap)
        profiles = list(itertools.product(range(base), repeat=s))

        def code(p):
            c = 0
            for i in range(s - 1, -1, -1):
                c = c * base + p[i]
            return c

        # best size over all sets whose profile dominates the requested lower bounds
        upper = {}
        for want in profiles:
            val = -1
            for p in profiles:
                if all(p[i] >= want[i] for i in range(s)):
                    val = max(val, best[code(p)])
            upper[want] = val
        bd = [[bdist[i][w] for w in bverts] for i in range(s)]
        choices = [[list(range(bd[i][j] + 1)) for j in range(s)] for i in range(s)]
        rows_allowed = [list(itertools.product(*choices[i])) for i in range(s)]
        entries = {}
        for want, val in upper.items():
            if val < 0:
                continue
            for mats in itertools.product(*rows_allowed):
                R = tuple((want[i],) + tuple(mats[i]) for i in range(s))
                entries[R] = val
        return EncoderTable(MAX, labels, entries, False)


# ------------------------------------------------------------ F-deletion

class FdelEncoder(Encoder):
    """Encodings are sets of (family index, rooted packing) pairs with a
    non-empty packing; ``S`` satisfies ``R`` when every such packing present
    in ``G - S`` lies in ``R`` and ``G - (boundary + S)`` has no member of the
    family as a minor.
    """

    direction = MIN
    upward = True

    def __init__(self, family: Sequence[tuple[str, Graph]]):
        if not family:
            raise ConfigError("the excluded family is empty")
        for name, f in family:
            if f.n > MAX_FAMILY_VERTICES:
                raise ConfigError(f"family member {name} has more than {MAX_FAMILY_VERTICES} vertices")
            if f.n == 0 or not is_connected(f):
                raise ConfigError(f"family member {name} is not connected")
            if not _pattern_facts(f)[3]:
                raise ConfigError(f"family member {name} is not planar")
        self.family = tuple(family)
        self.name = "fdel:F=" + ",".join(name for name, _ in family)

    def g(self, t: int) -> int:
        return t

    def universe(self, labels) -> list:
        out = []
        for i, (_, f) in enumerate(self.family):
            out += [(i, rp) for rp in enumerate_rooted_packings(labels, f) if rp.packing]
        return out

    def iter_encodings(self, labels):
        uni = self.universe(labels)
        if len(uni) > 20:
            raise ResourceError(f"{self.name}: 2^{len(uni)} encodings are too many to list")
        for size in range(len(uni) + 1):
            for combo in itertools.combinations(uni, size):
                yield frozenset(combo)

    def count(self, labels) -> int:
        return 2 ** len(self.universe(labels))

    def canon(self, encoding):
        return [[i, rp.key()] for i, rp in sorted(encoding)]

    def satisfies(self, bg, solution, encoding) -> bool:
        g = bg.graph
        s = set(solution)
        rest, vmap = remove_vertices(g, s)
        kept_boundary = [(vmap[v], lab) for v, lab in bg.boundary if v not in s]
        sub = BoundariedGraph(rest, tuple(kept_boundary))
        inner, _ = remove_vertices(g, s | set(bg.boundary_vertices))
        for i, (_, f) in enumerate(self.family):
            if has_minor(inner, f):
                return False
            for rp in packing_traces(sub, f):
                if rp.packing and (i, rp) not in encoding:
                    return False
        return True

    def table(self, bg: BoundariedGraph) -> EncoderTable:
        g = bg.graph
        n = g.n
        tracked = []  # (item, masks)
        blockers = []  # masks of complete models avoiding the boundary
        for i, (_, f) in enumerate(self.family):
            for rp, masks in packing_traces(bg, f).items():
                if rp.packing:
                    tracked.append(((i, rp), masks))
                elif len(rp.s_f_star) == f.n:
                    blockers.extend(masks)
        exact: dict = {}
        for size in range(n + 1):
            for combo in itertools.combinations(range(n), size):
                smask = 0
                for v in combo:
                    smask |= 1 << v
                if any(not (m & smask) for m in blockers):
                    continue
                present = frozenset(item for item, masks in tracked if any(not (m & smask) for m in masks))
                if present not in exact:
                    exact[present] = size
        gens: dict = {}
        for key, val in sorted(exact.items(), key=lambda kv: (kv[1], len(kv[0]))):
            if not any(k <= key for k in gens):
                gens[key] = val
        return EncoderTable(MIN, tuple(bg.labels), gens, True)


def make_rds_encoder(r: int) -> RdsEncoder:
    return RdsEncoder(r)


def make_ris_encoder(d: int) -> RisEncoder:
    return RisEncoder(d)


def make_fdel_encoder(family: Iterable) -> FdelEncoder:
    members = []
    for item in family:
        if isinstance(item, str):
            members.append((item, named_graph(item)))
        elif isinstance(item, Graph):
            members.append((f"G{len(members)}", item))
        else:
            members.append(tuple(item))
    return FdelEncoder(members)


# ---------------------------------------------------------------- oracles

def solve_rds(g: Graph, r: int, limit: int | None = None) -> int | None:
    """Minimum r-dominating set size, or None if it exceeds ``limit``."""
    if g.n == 0:
        return 0
    balls = _balls(_distances(g), r)
    size, _ = kernels.min_cover(g.n, balls, g.n if limit is None else max(limit, -1))
    return None if size < 0 else size


def solve_independent(g: Graph, d: int) -> int:
    """Maximum size of a set with pairwise distance greater than ``d``."""
    if g.n == 0:
        return 0
    size, _ = kernels.max_packing(g.n, _balls(_distances(g), d))
    return size


def _shortest_cycle(adj: Sequence[int], alive: int) -> list[int] | None:
    best = None
    for s in bits(alive):
        parent = {s: -1}
        depth = {s: 0}
        q = deque([s])
        while q:
            u = q.popleft()
            if best is not None and 2 * depth[u] + 1 >= len(best):
                break
            for w in bits(adj[u] & alive):
                if w == parent[u]:
                    continue
                if w in depth:
                    # cycle through s's BFS tree
                    a, b = u, w
                    pa, pb = [], []
                    while a != -1:
                        pa.append(a)
                        a = parent[a]
                    while b != -1:
                        pb.append(b)
                        b = parent[b]
                    common = set(pa) & set(pb)
                    cyc = [x for x in pa if x not in common] + [x for x in pb if x not in common]
                    top = next(x for x in pa if x in common)
                    cyc.append(top)
                    if best is None or len(cyc) < len(best):
                        best = cyc
                    continue
                parent[w] = u
                depth[w] = depth[u] + 1
                q.append(w)
    return best


def _prune_low_degree(adj: Sequence[int], alive: int) -> int:
    changed = True
    while changed:
        changed = False
        for v in bits(alive):
            if (adj[v] & alive).bit_count() <= 1:
                alive &= ~(1 << v)
                changed = True
    return alive


def _find_model(adj: Sequence[int], alive: int, family: Sequence[tuple[str, Graph]]) -> list[int] | None:
    for name, f in family:
        if f.n == 2:
            for v in bits(alive):
                nb = adj[v] & alive
                if nb:
                    return [v, (nb & -nb).bit_length() - 1]
            continue
        if f.n == 3 and f.m == 3:
            core = _prune_low_degree(adj, alive)
            if core:
                return _shortest_cycle(adj, core)
            continue
        idx = bits(alive)
        pos = {v: i for i, v in enumerate(idx)}
        edges = tuple((pos[v], pos[u]) for v in idx for u in bits(adj[v] & alive) if u > v)
        sub = Graph(len(idx), edges)
        model = minor_model_vertices(sub, f)
        if model is not None:
            return [idx[i] for i in model]
    return None


def solve_fdel(g: Graph, family: Sequence[tuple[str, Graph]], limit: int | None = None) -> int | None:
    """Minimum deletion set hitting every minor model of the family."""
    adj = g.adj
    full = (1 << g.n) - 1
    top = g.n if limit is None else limit
    memo: dict = {}

    def hit(alive: int, k: int) -> bool:
        key = (alive, k)
        if key in memo:
            return memo[key]
        model = _find_model(adj, alive, family)
        if model is None:
            res = True
        elif k == 0:
            res = False
        else:
            res = any(hit(alive & ~(1 << v), k - 1) for v in model)
        memo[key] = res
        return res

    for k in range(0, top + 1):
        if hit(full, k):
            return k
    return None


# ---------------------------------------------------------- problem specs

_SPEC = re.compile(r"^(rds|rss):r=(\d+)$|^fdel:F=([A-Za-z0-9]+(?:,[A-Za-z0-9]+)*)$")


@dataclass(frozen=True)
class Problem:
    spec: str
    kind: str
    r: int = 0
    family_names: tuple[str, ...] = ()

    @cached_property
    def family(self) -> tuple[tuple[str, Graph], ...]:
        return tuple((name, named_graph(name)) for name in self.family_names)

    @cached_property
    def encoder(self) -> Encoder:
        if self.kind == "rds":
            return RdsEncoder(self.r)
        if self.kind == "rss":
            return RisEncoder(2 * self.r)
        return FdelEncoder(self.family)

    @property
    def direction(self) -> str:
        return MAX if self.kind == "rss" else MIN

    def solve(self, g: Graph, limit: int | None = None) -> int | None:
        if g.n > ORACLE_CAP:
            raise ResourceError(f"oracles limited to {ORACLE_CAP} vertices")
        if self.kind == "rds":
            return solve_rds(g, self.r, limit)
        if self.kind == "rss":
            return solve_independent(g, 2 * self.r)
        return solve_fdel(g, self.family, limit)

    def decide_value(self, value: int | None, k: int) -> bool:
        if self.direction == MIN:
            return value is not None and value <= k
        return value >= k

    def decide(self, g: Graph, k: int) -> bool:
        if self.direction == MIN:
            if k < 0:
                return False
            return self.decide_value(self.solve(g, limit=k), k)
        if k <= 0:
            return True
        return self.decide_value(self.solve(g), k)


def parse_problem(spec: str) -> Problem:
    m = _SPEC.match(spec.strip())
    if not m:
        raise ConfigError(f"cannot parse problem spec {spec!r}; expected rds:r=N, rss:r=N or fdel:F=A,B")
    if m.group(1):
        r = int(m.group(2))
        if not 1 <= r <= MAX_RADIUS:
            raise ConfigError(f"r must be in 1..{MAX_RADIUS}, got {r}")
        return Problem(spec.strip(), m.group(1), r=r)
    names = tuple(m.group(3).split(","))
    for name in names:
        if name not in FAMILY_NAMES:
            raise ConfigError(f"unknown family member {name!r}; known: {', '.join(FAMILY_NAMES)}")
    if len(set(names)) != len(names):
        raise ConfigError("family members must be distinct")
    FdelEncoder(tuple((name, named_graph(name)) for name in names))
    return Problem(spec.strip(), "fdel", family_names=names)


def oracle_solve(problem: Problem | str, g: Graph) -> int:
    p = parse_problem(problem) if isinstance(problem, str) else problem
    return p.solve(g)


def problem_decide(problem: Problem | str, g: Graph, k: int) -> bool:
    p = parse_problem(problem) if isinstance(problem, str) else problem
    return p.decide(g, k)
