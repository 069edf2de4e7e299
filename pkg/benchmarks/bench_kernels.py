"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--seed 1]
"""
import argparse
import itertools
import random
import statistics
import timeit

from protkernel import _kernels_py as py

try:
    from protkernel import _kernels as cy
except ImportError:
    cy = None


def random_adj(rng, n, p):
    adj = [0] * n
    for u, v in itertools.combinations(range(n), 2):
        if rng.random() < p:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
    return adj


def balls(n, adj, radius):
    dist = py.bfs_all(n, adj)
    return [[sum(1 << u for u in range(n) if 0 <= dist[v][u] <= rho) for v in range(n)] for rho in range(radius + 1)]


def workloads(rng):
    n = 14
    adj = random_adj(rng, n, 0.25)
    bl = balls(n, adj, 2)
    reqs = [(rng.getrandbits(n) & rng.getrandbits(n), [rng.getrandbits(n) for _ in bl]) for _ in range(40)]
    dist = py.bfs_all(n, adj)
    conflict = [sum(1 << u for u in range(n) if 0 <= dist[v][u] <= 1) for v in range(n)]
    bdist = [[3 if dist[i][v] < 0 else min(dist[i][v], 3) for v in range(n)] for i in range(2)]
    small = 9
    sadj = random_adj(rng, small, 0.35)
    return {
        "bfs_all n=14": lambda m: m.bfs_all(n, adj),
        "ds_table n=14 x40": lambda m: m.ds_table(n, bl, reqs),
        "independent_profiles n=14": lambda m: m.independent_profiles(n, conflict, bdist, 3),
        "min_cover n=14": lambda m: m.min_cover(n, bl[1], n),
        "max_packing n=14": lambda m: m.max_packing(n, conflict),
        "treewidth_dp n=14": lambda m: m.treewidth_dp(n, adj, 0, n + 1),
        "block_partitions n=9 h=3": lambda m: m.block_partitions(small, sadj, (1 << small) - 1, 0b11, 3),
    }


def best_of(fn, repeat):
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(t / number for t in timer.repeat(repeat, number)), number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)
    if cy is None:
        print("compiled extension not built; only the fallback is timed")
    print(f"{'kernel':28} {'python ms':>11} {'cython ms':>11} {'speedup':>8}")
    ratios = []
    for name, run in workloads(random.Random(args.seed)).items():
        tp, _ = best_of(lambda: run(py), args.repeat)
        if cy is None:
            print(f"{name:28} {tp * 1e3:11.3f} {'-':>11} {'-':>8}")
            continue
        tc, _ = best_of(lambda: run(cy), args.repeat)
        ratios.append(tp / tc)
        print(f"{name:28} {tp * 1e3:11.3f} {tc * 1e3:11.3f} {tp / tc:7.1f}x")
    if ratios:
        print(f"geometric mean speedup: {statistics.geometric_mean(ratios):.1f}x")


if __name__ == "__main__":
    main()
