"""Enumeration of small boundaried graphs and the repository of progressive
representatives.

Graphs are bucketed by ``(label set, normalized truncated table, class
signature)``. Inside a bucket every table is a shift of every other, so the
member with the smallest anchor value has ``delta(rep, member) <= 0`` for
all members; ties go to fewer vertices, then to the smaller canonical code.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator

import networkx as nx

from .catalog import named_graph
from .encoders import Encoder, EncoderTable, compute_table, confine_table, normalize_signature
from .errors import FormatError, InputError, ResourceError, UsageError
from .graph import (BoundariedGraph, Graph, attach_boundary, canonical_code, format_graph,
                    parse_graph)
from .minors import class_signature, has_minor, has_topological_minor
from .problems import Problem, parse_problem
from .treedec import rooted_width, treewidth_at_most

FORMAT_VERSION = 1
ENUM_CAP = 9


def width_for(t: int) -> int:
    """Treewidth allowed for members of the universe with ``t`` labels."""
    return max(t - 1, 1)


# ---------------------------------------------------------------- enumeration

@lru_cache(maxsize=None)
def _unlabeled(n: int, width: int) -> tuple[Graph, ...]:
    """All graphs on ``n`` vertices with treewidth at most ``width``, one per
    isomorphism class, sorted by canonical code."""
    if n == 0:
        return (Graph(0, ()),)
    seen: dict[bytes, Graph] = {}
    for base in _unlabeled(n - 1, width):
        for nb in range(1 << (n - 1)):
            edges = base.edges + tuple((u, n - 1) for u in range(n - 1) if nb >> u & 1)
            g = Graph(n, tuple(sorted(edges)))
            code = canonical_code(g)
            if code in seen:
                continue
            if treewidth_at_most(g, width):
                seen[code] = g
    return tuple(seen[c] for c in sorted(seen))


def _automorphisms(g: Graph) -> list[tuple[int, ...]]:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    matcher = nx.algorithms.isomorphism.GraphMatcher(h, h)
    return [tuple(m[v] for v in range(g.n)) for m in matcher.isomorphisms_iter()]


def _placements(n: int, s: int, autos: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Injective ``s``-tuples of vertices, one per orbit of the automorphism group."""
    out: list[tuple[int, ...]] = []

    def rec(prefix: tuple[int, ...], group: list[tuple[int, ...]]) -> None:
        if len(prefix) == s:
            out.append(prefix)
            return
        used = set(prefix)
        done: set[int] = set()
        for v in range(n):
            if v in used or v in done:
                continue
            done.update(a[v] for a in group)
            rec(prefix + (v,), [a for a in group if a[v] == v])

    rec((), autos)
    return out


def in_universe(bg: BoundariedGraph, t: int, width: int | None = None) -> bool:
    """Membership test for the enumerated universe: at most ``t`` labels drawn
    from 1..t and a decomposition of width ``width`` rooted at the boundary."""
    w = width_for(t) if width is None else width
    if any(not 1 <= lab <= t for lab in bg.labels):
        return False
    return rooted_width(bg) <= w


def enumerate_Ft(t: int, max_size: int, width: int | None = None) -> Iterator[BoundariedGraph]:
    """Every boundaried graph on 1..max_size vertices whose labels are drawn
    from 1..t and which has a decomposition of width ``width`` (default
    ``max(t-1, 1)``) with the boundary inside the root bag.

    Each isomorphism class (labels fixed) is produced exactly once, ordered by
    size, then underlying graph, then label set, then placement.
    """
    if t < 0 or max_size < 0:
        raise InputError("t and max_size must be non-negative")
    if max_size > ENUM_CAP:
        raise ResourceError(f"enumeration limited to {ENUM_CAP} vertices, asked for {max_size}")
    w = width_for(t) if width is None else width
    label_sets = [I for s in range(t + 1) for I in itertools.combinations(range(1, t + 1), s)]
    for n in range(1, max_size + 1):
        for g in _unlabeled(n, w):
            autos = _automorphisms(g)
            by_size: dict[int, list[tuple[int, ...]]] = {}
            for I in label_sets:
                if len(I) > n:
                    continue
                if len(I) not in by_size:
                    by_size[len(I)] = _placements(n, len(I), autos)
                for place in by_size[len(I)]:
                    bg = attach_boundary(g, zip(place, I))
                    if rooted_width(bg) <= w:
                        yield bg


def naive_enumerate_Ft(t: int, max_size: int, width: int | None = None) -> list[BoundariedGraph]:
    """Generate-and-filter reference: every labeled graph, deduplicated by canonical code."""
    w = width_for(t) if width is None else width
    seen: dict[bytes, BoundariedGraph] = {}
    for n in range(1, max_size + 1):
        pairs = list(itertools.combinations(range(n), 2))
        for emask in range(1 << len(pairs)):
            g = Graph(n, tuple(p for i, p in enumerate(pairs) if emask >> i & 1))
            for s in range(min(t, n) + 1):
                for I in itertools.combinations(range(1, t + 1), s):
                    for place in itertools.permutations(range(n), s):
                        bg = attach_boundary(g, zip(place, I))
                        code = canonical_code(bg)
                        if code not in seen and rooted_width(bg) <= w:
                            seen[code] = bg
    return list(seen.values())


# ---------------------------------------------------------------- repository

def _excluded_graph(exclude: str | None) -> Graph | None:
    return None if exclude is None else named_graph(exclude)


def _contains(g: Graph, h: Graph, mode: str) -> bool:
    return has_minor(g, h) if mode == "minor" else has_topological_minor(g, h)


@dataclass
class Bucket:
    key: str
    labels: tuple[int, ...]
    rep: BoundariedGraph
    code: bytes
    table: EncoderTable
    members: int = 1

    @property
    def anchor(self) -> int:
        a = self.table.anchor()
        return 0 if a is None else a


@dataclass
class Repository:
    problem: Problem
    t: int
    b: int
    exclude: str | None = None
    mode: str = "minor"
    width: int = 1
    buckets: dict[str, Bucket] = field(default_factory=dict)

    @property
    def encoder(self) -> Encoder:
        return self.problem.encoder

    @property
    def g(self) -> int:
        return self.encoder.g(self.t)

    @property
    def excluded(self) -> Graph | None:
        return _excluded_graph(self.exclude)

    def header(self) -> dict:
        return {"encoder": self.encoder.name, "problem": self.problem.spec, "g": self.g, "t": self.t,
                "exclude": self.exclude, "mode": self.mode, "b": self.b, "width": self.width,
                "version": FORMAT_VERSION}

    def key_of(self, bg: BoundariedGraph, table: EncoderTable | None = None) -> str:
        if table is None:
            table = compute_table(bg, self.encoder)
        return bucket_key(bg, table, self.encoder, self.g, self.excluded, self.mode)

    def max_rep_size(self) -> int:
        return max((bk.rep.n for bk in self.buckets.values()), default=0)


def bucket_key(bg: BoundariedGraph, table: EncoderTable, enc: Encoder, g: int,
               excluded: Graph | None, mode: str) -> str:
    sig = normalize_signature(confine_table(table, g), enc).digest()
    cls = class_signature(bg, excluded, mode).digest() if excluded is not None else ""
    blob = json.dumps([list(bg.labels), sig, cls], separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _record(args) -> tuple[str, BoundariedGraph, EncoderTable, bytes]:
    bg, problem_spec, g, excluded, mode = args
    enc = parse_problem(problem_spec).encoder
    table = compute_table(bg, enc)
    return bucket_key(bg, table, enc, g, excluded, mode), bg, table, canonical_code(bg)


def build_repository(problem: Problem | str, t: int, b: int, exclude: str | None = None, mode: str = "minor",
                     width: int | None = None, jobs: int = 1,
                     graphs: Iterable[BoundariedGraph] | None = None) -> Repository:
    """Bucket every enumerated graph with at most ``b`` vertices and keep the
    progressive representative of each bucket."""
    if b < 1:
        raise UsageError("size bound must be at least 1")
    if mode not in ("minor", "topological"):
        raise UsageError(f"unknown exclusion mode {mode!r}")
    p = parse_problem(problem) if isinstance(problem, str) else problem
    w = width_for(t) if width is None else width
    h = _excluded_graph(exclude)
    repo = Repository(p, t, b, exclude, mode, w)
    source = enumerate_Ft(t, b, w) if graphs is None else graphs
    if h is not None:
        source = (bg for bg in source if not _contains(bg.graph, h, mode))
    tasks = ((bg, p.spec, repo.g, h, mode) for bg in source)
    if jobs > 1:
        import multiprocessing as mp
        with mp.get_context("fork").Pool(jobs) as pool:
            records = list(pool.imap(_record, tasks, chunksize=64))
    else:
        records = map(_record, tasks)
    for key, bg, table, code in records:
        cur = repo.buckets.get(key)
        a = table.anchor()
        a = 0 if a is None else a
        if cur is None:
            repo.buckets[key] = Bucket(key, tuple(bg.labels), bg, code, table)
            continue
        cur.members += 1
        if (a, bg.n, code) < (cur.anchor, cur.rep.n, cur.code):
            cur.rep, cur.code, cur.table = bg, code, table
    return repo


def delta(t1: EncoderTable, t2: EncoderTable) -> int:
    """Shift between two tables of one bucket, computed from their anchors."""
    a1, a2 = t1.anchor(), t2.anchor()
    if a1 is None or a2 is None:
        return 0
    return a1 - a2


def lookup(repo: Repository, bg: BoundariedGraph) -> tuple[BoundariedGraph, int] | None:
    """Representative of ``bg``'s bucket and ``delta(rep, bg)``, or None."""
    table = compute_table(bg, repo.encoder)
    bucket = repo.buckets.get(repo.key_of(bg, table))
    if bucket is None:
        return None
    return bucket.rep, delta(bucket.table, table)


@dataclass
class ProgressReport:
    checked: int
    violations: list = field(default_factory=list)
    missing: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations and not self.missing


def verify_progressive(repo: Repository, graphs: Iterable[BoundariedGraph]) -> ProgressReport:
    """Recompute every graph's key and check ``delta(rep, graph) <= 0``.

    The representative's own key is recomputed too, so a representative that
    does not belong to its bucket is reported.
    """
    rep_ok: dict[str, bool] = {}
    report = ProgressReport(0)
    h = repo.excluded
    for bg in graphs:
        if h is not None and _contains(bg.graph, h, repo.mode):
            continue
        report.checked += 1
        table = compute_table(bg, repo.encoder)
        key = repo.key_of(bg, table)
        bucket = repo.buckets.get(key)
        if bucket is None:
            report.missing.append(bg)
            continue
        if key not in rep_ok:
            rep_ok[key] = repo.key_of(bucket.rep) == key
            if not rep_ok[key]:
                report.violations.append((key, bucket.rep, None))
        d = delta(bucket.table, table)
        if d > 0:
            report.violations.append((key, bg, d))
    return report


# ------------------------------------------------------------ serialization

def _table_rows(table: EncoderTable, enc: Encoder) -> list:
    if table.upward:
        rows = [[enc.canon(k), v] for k, v in table.entries.items()]
        return sorted(rows, key=lambda r: json.dumps(r, separators=(",", ":")))
    return [[enc.canon(R), table.entries[R]] for R in enc.iter_encodings(table.labels) if R in table.entries]


def _body(repo: Repository) -> dict:
    records = []
    for key in sorted(repo.buckets):
        bk = repo.buckets[key]
        records.append({"key": key, "labels": list(bk.labels), "members": bk.members,
                        "rep": format_graph(bk.rep), "table": _table_rows(bk.table, repo.encoder)})
    return {"header": repo.header(), "records": records}


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def serialize(repo: Repository) -> str:
    body = _body(repo)
    checksum = hashlib.sha256(_dump(body).encode()).hexdigest()
    return _dump({"checksum": checksum, **body}) + "\n"


def save(repo: Repository, path: str | os.PathLike) -> None:
    text = serialize(repo)
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


_EXPECTABLE = ("encoder", "problem", "t", "b", "exclude", "mode", "g", "width")


def loads(text: str, expect: dict | None = None) -> Repository:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"repository file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or not {"checksum", "header", "records"} <= doc.keys():
        raise FormatError("repository file lacks checksum, header or records")
    head = doc["header"]
    if head.get("version") != FORMAT_VERSION:
        raise FormatError(f"unsupported repository version {head.get('version')!r}")
    body = {"header": head, "records": doc["records"]}
    if hashlib.sha256(_dump(body).encode()).hexdigest() != doc["checksum"]:
        raise FormatError("repository checksum mismatch")
    for name, want in (expect or {}).items():
        if name not in _EXPECTABLE:
            raise UsageError(f"cannot match repository on {name!r}")
        if head.get(name) != want:
            raise UsageError(f"repository has {name}={head.get(name)!r}, requested {want!r}")
    try:
        problem = parse_problem(head["problem"])
        repo = Repository(problem, int(head["t"]), int(head["b"]), head["exclude"], head["mode"],
                          int(head["width"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed repository header: {exc}") from None
    if problem.encoder.name != head.get("encoder") or repo.g != head.get("g"):
        raise FormatError("repository header is inconsistent with its problem")
    for rec in doc["records"]:
        try:
            rep = parse_graph(rec["rep"])
            key = rec["key"]
        except (KeyError, TypeError, InputError) as exc:
            raise FormatError(f"malformed repository record: {exc}") from None
        # revalidate: the stored key and table must be reproducible
        table = compute_table(rep, repo.encoder)
        if rep.n > repo.b or list(rep.labels) != rec.get("labels"):
            raise FormatError(f"record {key[:12]} violates the size or label invariant")
        if _table_rows(table, repo.encoder) != rec.get("table") or repo.key_of(rep, table) != key:
            raise FormatError(f"record {key[:12]} does not match its representative")
        if key in repo.buckets:
            raise FormatError(f"duplicate record {key[:12]}")
        repo.buckets[key] = Bucket(key, tuple(rep.labels), rep, canonical_code(rep), table,
                                   int(rec.get("members", 1)))
    return repo


def load(path: str | os.PathLike, expect: dict | None = None) -> Repository:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError:
        raise UsageError(f"repository file {os.fspath(path)!r} not found; build it with 'protkernel repo'") from None
    return loads(text, expect)


# ------------------------------------------------------------------ checks

@dataclass
class StabilityReport:
    stable: bool
    changed: list
    added: int


def stability_check(problem: Problem | str, t: int, b: int, exclude: str | None = None, mode: str = "minor") -> StabilityReport:
    """Rebuild with bound ``b + 1`` and compare the representatives of the
    buckets already present at bound ``b``."""
    small = build_repository(problem, t, b, exclude, mode)
    big = build_repository(problem, t, b + 1, exclude, mode)
    changed = [k for k, bk in small.buckets.items() if big.buckets[k].code != bk.code]
    return StabilityReport(not changed, changed, len(big.buckets) - len(small.buckets))


def class_count_bound(repo: Repository, signatures: int = 1) -> float:
    """Loose upper bound ``(g+2)^s * 2^t * signatures`` on the number of buckets,
    with ``s`` the number of encodings for the full label set."""
    s = repo.encoder.count(tuple(range(1, repo.t + 1)))
    if s > 4096:
        return math.inf
    return (repo.g + 2) ** s * 2 ** repo.t * max(signatures, 1)
