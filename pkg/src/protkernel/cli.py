"""Command-line front end: ``protkernel repo | kernelize | verify``.

Exit status: 0 when every requested check passes, 1 when a check fails, 2 on
usage, configuration, input or file-format errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass

from .catalog import named_graph
from .errors import InputError, KernelError, UsageError
from .graph import format_graph, parse_graph
from .minors import has_minor, has_topological_minor
from .problems import parse_problem
from .protrusion import (build_protrusion_decomposition, find_modulator, kernelize, read_modulator,
                         validate_protrusion_decomposition)
from .repository import build_repository, enumerate_Ft, load, save, serialize, verify_progressive
from .graph import remove_vertices
from .treedec import exact_treewidth


@dataclass
class RunConfig:
    command: str
    problem: str | None
    t: int
    b: int
    exclude: str | None
    exclude_mode: str
    mode: str
    input: str | None
    modulator: str | None
    repo: str | None
    output: str | None
    report: str | None
    verify: bool
    seed: int
    count: int
    k: int | None
    jobs: int
    strict: bool


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="protkernel", description="Protrusion-replacement kernels on small graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--problem", help="rds:r=N, rss:r=N or fdel:F=A[,B...]")
        sp.add_argument("--t", type=int, default=2, help="boundary size of replaced pieces (default 2)")
        sp.add_argument("--size-bound", dest="b", type=int, default=4, help="largest representative size b")
        sp.add_argument("--exclude", help="excluded graph name, e.g. K5")
        sp.add_argument("--exclude-mode", dest="exclude_mode", choices=("minor", "topological"), default="minor")
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--output", help="output file")

    sp = sub.add_parser("repo", help="build a representative repository")
    common(sp)
    sp = sub.add_parser("kernelize", help="kernelize one instance")
    common(sp)
    sp.add_argument("--input", required=True, help="graph file")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--repo", required=True, help="repository file")
    sp.add_argument("--mode", choices=("modulator", "greedy"), default="modulator")
    sp.add_argument("--modulator", help="modulator file, one vertex per line")
    sp.add_argument("--report", help="where to write the JSON report (default: stdout)")
    sp.add_argument("--verify", action="store_true", help="check equivalence with the exact oracle")
    sp.add_argument("--strict", action="store_true", help="fail when a piece has no representative")
    sp = sub.add_parser("verify", help="run a seeded verification campaign")
    common(sp)
    sp.add_argument("--repo", help="use this repository instead of building one")
    sp.add_argument("--mode", choices=("modulator", "greedy"), default="modulator")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=50)
    sp.add_argument("--report", help="where to write the JSON report (default: stdout)")
    return p


def parse_config(argv: list[str]) -> RunConfig:
    ns = _parser().parse_args(argv)
    cfg = RunConfig(
        command=ns.command, problem=ns.problem, t=ns.t, b=ns.b, exclude=ns.exclude,
        exclude_mode=ns.exclude_mode, mode=getattr(ns, "mode", "modulator"), input=getattr(ns, "input", None),
        modulator=getattr(ns, "modulator", None), repo=getattr(ns, "repo", None), output=ns.output,
        report=getattr(ns, "report", None), verify=getattr(ns, "verify", False), seed=getattr(ns, "seed", 0),
        count=getattr(ns, "count", 50), k=getattr(ns, "k", None), jobs=ns.jobs, strict=getattr(ns, "strict", False),
    )
    if cfg.b < 1:
        raise UsageError("--size-bound must be at least 1")
    if cfg.t < 1:
        raise UsageError("--t must be at least 1")
    if cfg.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    if cfg.mode == "greedy" and cfg.modulator:
        raise UsageError("--modulator cannot be combined with --mode greedy")
    if cfg.command in ("repo", "verify") and not cfg.problem and not cfg.repo:
        raise UsageError("--problem is required")
    if cfg.k is not None and cfg.k < 0:
        raise UsageError("--k must be non-negative")
    if cfg.count is not None and cfg.count < 0:
        raise UsageError("--count must be non-negative")
    if cfg.exclude is not None:
        named_graph(cfg.exclude)
    if cfg.problem:
        parse_problem(cfg.problem)
    return cfg


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _expect(cfg: RunConfig) -> dict:
    want = {}
    if cfg.problem:
        want["problem"] = parse_problem(cfg.problem).spec
    if cfg.exclude:
        want["exclude"] = cfg.exclude
        want["mode"] = cfg.exclude_mode
    return want


def cmd_repo(cfg: RunConfig) -> int:
    start = time.perf_counter()
    repo = build_repository(cfg.problem, cfg.t, cfg.b, cfg.exclude, cfg.exclude_mode, jobs=cfg.jobs)
    elapsed = time.perf_counter() - start
    if cfg.output:
        save(repo, cfg.output)
    else:
        sys.stdout.write(serialize(repo))
    sys.stderr.write(f"classes {len(repo.buckets)}  max representative {repo.max_rep_size()} vertices  "
                     f"built in {elapsed:.2f}s\n")
    return 0


def _read_text(path: str, what: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except FileNotFoundError:
        raise UsageError(f"{what} file {path!r} not found") from None


def cmd_kernelize(cfg: RunConfig) -> int:
    repo = load(cfg.repo, _expect(cfg))
    bg = parse_graph(_read_text(cfg.input, "input"))
    if bg.boundary:
        raise InputError("kernelization input must not carry boundary labels")
    g = bg.graph
    xs = read_modulator(_read_text(cfg.modulator, "modulator"), g.n) if cfg.modulator else None
    rep = kernelize(g, cfg.k, repo, mode=cfg.mode, modulator=xs, strict=cfg.strict)
    out = rep.as_dict()
    status = 0
    if cfg.verify:
        p = repo.problem
        before, after = p.decide(g, cfg.k), p.decide(rep.graph, rep.k_out)
        out["verify"] = {"decide_input": before, "decide_output": after, "equivalent": before == after}
        status = 0 if before == after else 1
    if cfg.output:
        _write(cfg.output, format_graph(rep.graph))
    _write(cfg.report, _dump(out))
    return status


def _campaign_item(args):
    inst, repo, mode, exclude, exclude_mode = args
    p = repo.problem
    g = inst.graph
    rep = kernelize(g, inst.k, repo, mode=mode)
    checks = {
        "equivalence": p.decide(g, inst.k) == p.decide(rep.graph, rep.k_out),
        "k_monotone": rep.k_out <= inst.k,
        "size_monotone": rep.graph.n <= g.n,
    }
    if exclude is not None:
        h = named_graph(exclude)
        test = has_minor if exclude_mode == "minor" else has_topological_minor
        checks["class_preserved"] = not test(rep.graph, h)
    if mode == "modulator":
        xs = find_modulator(g, repo.width)
        rest, _ = remove_vertices(g, xs)
        pd = build_protrusion_decomposition(g, xs, max(repo.width, exact_treewidth(rest)))
        checks["decomposition_valid"] = bool(validate_protrusion_decomposition(g, pd))
    return {"name": inst.name, "n": g.n, "k": inst.k, "n_out": rep.graph.n, "k_out": rep.k_out,
            "splices": sum(1 for e in rep.log if hasattr(e, "delta")), "checks": checks}


def cmd_verify(cfg: RunConfig) -> int:
    from .corpus import random_corpus

    start = time.perf_counter()
    if cfg.repo:
        repo = load(cfg.repo, _expect(cfg))
    else:
        repo = build_repository(cfg.problem, cfg.t, cfg.b, cfg.exclude, cfg.exclude_mode, jobs=cfg.jobs)
    exclude = repo.exclude
    prog = verify_progressive(repo, enumerate_Ft(repo.t, repo.b, repo.width))
    h = named_graph(exclude) if exclude else None
    corpus = random_corpus(cfg.seed, cfg.count, exclude=h, mode=repo.mode)
    tasks = [(inst, repo, cfg.mode, exclude, repo.mode) for inst in corpus]
    if cfg.jobs > 1:
        import multiprocessing as mp
        with mp.get_context("fork").Pool(cfg.jobs) as pool:
            rows = pool.map(_campaign_item, tasks)
    else:
        rows = [_campaign_item(a) for a in tasks]
    totals: dict[str, list[int]] = {}
    for row in rows:
        for name, ok in row["checks"].items():
            acc = totals.setdefault(name, [0, 0])
            acc[0] += ok
            acc[1] += 1
    totals["repository_progressive"] = [int(prog.ok), 1]
    passed = all(a == b for a, b in totals.values())
    report = {
        "config": {"problem": repo.problem.spec, "t": repo.t, "b": repo.b, "exclude": exclude,
                   "exclude_mode": repo.mode, "mode": cfg.mode, "seed": cfg.seed, "count": cfg.count},
        "repository": {"classes": len(repo.buckets), "max_representative": repo.max_rep_size(),
                       "progressive_violations": len(prog.violations), "missing": len(prog.missing)},
        "checks": {name: {"passed": a, "total": b} for name, (a, b) in sorted(totals.items())},
        "instances": rows,
        "passed": passed,
    }
    _write(cfg.report, _dump(report))
    elapsed = time.perf_counter() - start
    summary = "  ".join(f"{name} {a}/{b}" for name, (a, b) in sorted(totals.items()))
    sys.stderr.write(f"{'PASS' if passed else 'FAIL'}  {summary}  ({elapsed:.1f}s)\n")
    return 0 if passed else 1


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        handler = {"repo": cmd_repo, "kernelize": cmd_kernelize, "verify": cmd_verify}[cfg.command]
        return handler(cfg)
    except KernelError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
