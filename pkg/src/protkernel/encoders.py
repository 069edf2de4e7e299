"""Encoder abstraction, tables, truncation and the encoder equivalence.

A table maps encodings to optimal partial-solution sizes; entries that are
infeasible are simply absent, which stands for +inf on minimization
problems and -inf on maximization problems.

Sign convention: ``transposition(T1, T2) = f1 - f2``. Two equivalent
boundaried graphs then satisfy, for every host ``K``,
``decide(G1 + K, k + delta) == decide(G2 + K, k)``.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Iterator, Sequence

from .config import TABLE_CAP
from .errors import ResourceError
from .graph import BoundariedGraph, glue

MIN = "min"
MAX = "max"


@dataclass(frozen=True)
class EncoderTable:
    """Finite entries of ``f_G^E``.

    With ``upward`` set, the stored entries are generators of a monotone
    table: the value at ``R`` is the best entry whose key is a subset of ``R``.
    """

    direction: str
    labels: tuple[int, ...]
    entries: dict = field(hash=False, compare=True)
    upward: bool = False

    def value(self, encoding) -> float:
        if not self.upward:
            v = self.entries.get(encoding)
            if v is not None:
                return v
            return math.inf if self.direction == MIN else -math.inf
        best = None
        for key, v in self.entries.items():
            if key <= encoding and (best is None or _better(self.direction, v, best)):
                best = v
        if best is None:
            return math.inf if self.direction == MIN else -math.inf
        return best

    def anchor(self) -> int | None:
        """Best finite value: the minimum for min problems, maximum for max."""
        if not self.entries:
            return None
        vals = self.entries.values()
        return min(vals) if self.direction == MIN else max(vals)


def _better(direction: str, a, b) -> bool:
    return a < b if direction == MIN else a > b


class Encoder:
    """Base class. Subclasses implement ``iter_encodings``, ``satisfies`` and ``table``."""

    name = "encoder"
    direction = MIN
    upward = False

    def g(self, t: int) -> int:
        raise NotImplementedError

    def iter_encodings(self, labels: Sequence[int]) -> Iterator[Hashable]:
        raise NotImplementedError

    def encodings(self, labels: Sequence[int], limit: int = 1_000_000) -> list:
        if self.count(labels) > limit:
            raise ResourceError(f"{self.name}: more than {limit} encodings for labels {tuple(labels)}")
        return list(self.iter_encodings(labels))

    def count(self, labels: Sequence[int]) -> int:
        return sum(1 for _ in self.iter_encodings(labels))

    def satisfies(self, bg: BoundariedGraph, solution: Iterable[int], encoding) -> bool:
        raise NotImplementedError

    def table(self, bg: BoundariedGraph) -> EncoderTable:
        raise NotImplementedError

    def canon(self, encoding) -> Any:
        """JSON-friendly canonical form of an encoding."""
        return encoding

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


def compute_table(bg: BoundariedGraph, enc: Encoder, cap: int = TABLE_CAP) -> EncoderTable:
    if bg.n > cap:
        raise ResourceError(f"tables limited to {cap} vertices, got {bg.n}")
    return enc.table(bg)


def reference_table(bg: BoundariedGraph, enc: Encoder, cap: int = 10) -> EncoderTable:
    """Table straight from the definition: optimize over every vertex subset."""
    if bg.n > cap:
        raise ResourceError(f"reference tables limited to {cap} vertices")
    entries = {}
    subsets = [s for size in range(bg.n + 1) for s in itertools.combinations(range(bg.n), size)]
    if enc.direction == MAX:
        subsets.reverse()
    for R in enc.iter_encodings(bg.labels):
        for s in subsets:
            if enc.satisfies(bg, s, R):
                entries[R] = len(s)
                break
    return EncoderTable(enc.direction, tuple(bg.labels), entries, False)


def confine_table(table: EncoderTable, budget: int) -> EncoderTable:
    """Drop entries further than ``budget`` from the best finite value."""
    a = table.anchor()
    if a is None:
        return table
    if table.direction == MIN:
        kept = {k: v for k, v in table.entries.items() if v <= a + budget}
    else:
        kept = {k: v for k, v in table.entries.items() if v >= a - budget}
    return EncoderTable(table.direction, table.labels, kept, table.upward)


def spread(table: EncoderTable) -> int | None:
    if not table.entries:
        return None
    vals = table.entries.values()
    return max(vals) - min(vals)


@dataclass(frozen=True)
class Confinement:
    ok: bool
    spread: int | None
    bound: int


def check_confinement(bg: BoundariedGraph, enc: Encoder, t: int | None = None) -> Confinement:
    if t is None:
        t = max(bg.labels, default=0)
    s = spread(compute_table(bg, enc))
    bound = enc.g(t)
    return Confinement(s is None or s <= bound, s, bound)


@dataclass(frozen=True)
class NormalizedSignature:
    direction: str
    labels: tuple[int, ...]
    entries: tuple

    def digest(self) -> str:
        blob = json.dumps([self.direction, list(self.labels), list(self.entries)], separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _canon_key(enc: Encoder | None, key) -> str:
    if enc is None:
        return repr(key)
    return json.dumps(enc.canon(key), separators=(",", ":"))


def normalize_signature(table: EncoderTable, enc: Encoder | None = None) -> NormalizedSignature:
    """Subtract the anchor from every finite entry.

    Tables of non-monotone encoders become a vector in the encoder's
    enumeration order with ``None`` for infinite entries; monotone tables
    keep their sorted generator list.
    """
    a = table.anchor() or 0
    if enc is not None and not table.upward:
        rows = tuple(None if (v := table.entries.get(R)) is None else v - a
                     for R in enc.iter_encodings(table.labels))
    else:
        rows = tuple(sorted((_canon_key(enc, k), v - a) for k, v in table.entries.items()))
    return NormalizedSignature(table.direction, table.labels, rows)


def as_vector(table: EncoderTable, encodings: Sequence) -> tuple:
    return tuple(table.value(R) for R in encodings)


def transposition(t1: EncoderTable, t2: EncoderTable) -> int | None:
    """The constant ``c`` with ``t1 = t2 + c`` entrywise, or None."""
    if t1.labels != t2.labels or t1.direction != t2.direction or t1.upward != t2.upward:
        return None
    if t1.entries.keys() != t2.entries.keys():
        return None
    if not t1.entries:
        return 0
    diffs = {t1.entries[k] - t2.entries[k] for k in t1.entries}
    return diffs.pop() if len(diffs) == 1 else None


def encoder_equivalent(g1: BoundariedGraph, g2: BoundariedGraph, enc: Encoder, t: int | None = None,
                       class_sig_fn: Callable[[BoundariedGraph], Any] | None = None) -> int | None:
    """Transposition constant of the truncated tables, or None when inequivalent."""
    if tuple(g1.labels) != tuple(g2.labels):
        return None
    if t is None:
        t = max(g1.labels, default=0)
    budget = enc.g(t)
    d = transposition(confine_table(compute_table(g1, enc), budget), confine_table(compute_table(g2, enc), budget))
    if d is None:
        return None
    if class_sig_fn is not None and class_sig_fn(g1) != class_sig_fn(g2):
        return None
    return d


@dataclass
class RefinementReport:
    ok: bool
    checked: int
    mismatches: list


def canonical_refinement_check(g1: BoundariedGraph, g2: BoundariedGraph, delta: int, problem,
                               hosts: Iterable[BoundariedGraph], ks: Iterable[int] = range(0, 7),
                               stop_at_first: bool = False) -> RefinementReport:
    """Check ``decide(G1 + K, k + delta) == decide(G2 + K, k)`` over hosts and ``k``."""
    ks = list(ks)
    mismatches = []
    checked = 0
    for host in hosts:
        v1 = problem.solve(glue(g1, host))
        v2 = problem.solve(glue(g2, host))
        for k in ks:
            checked += 1
            if problem.decide_value(v1, k + delta) != problem.decide_value(v2, k):
                mismatches.append((host, k))
                if stop_at_first:
                    return RefinementReport(False, checked, mismatches)
    return RefinementReport(not mismatches, checked, mismatches)


def table_digest(table: EncoderTable, enc: Encoder) -> str:
    return normalize_signature(table, enc).digest()
