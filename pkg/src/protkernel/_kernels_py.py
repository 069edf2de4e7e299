"""Pure-Python implementations of the hot kernels.

Same signatures and results as the compiled module; selected at import when
the extension is unavailable.
"""

from __future__ import annotations


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bfs_all(n, adj):
    """All-pairs hop distances, -1 for unreachable pairs."""
    out = []
    for s in range(n):
        dist = [-1] * n
        dist[s] = 0
        seen = 1 << s
        frontier = seen
        d = 0
        while frontier:
            d += 1
            nxt = 0
            for w in _bits(frontier):
                nxt |= adj[w]
            nxt &= ~seen
            for w in _bits(nxt):
                dist[w] = d
            seen |= nxt
            frontier = nxt
        out.append(dist)
    return out


def ds_table(n, balls, reqs):
    """Minimum |S| for each requirement.

    ``balls[rho][v]`` is the radius-rho ball of ``v``. Each requirement is
    ``(zero_mask, needs)`` where ``needs[rho]`` are vertices that must lie
    within distance rho of S and ``zero_mask`` must be contained in S.
    Returns -1 where no S exists.
    """
    radii = len(balls)
    full = 1 << n
    cov = [[0] * full for _ in range(radii)]
    for s in range(1, full):
        low = s & -s
        v = low.bit_length() - 1
        prev = s ^ low
        for rho in range(radii):
            cov[rho][s] = cov[rho][prev] | balls[rho][v]
    best = [-1] * len(reqs)
    order = sorted(range(full), key=lambda s: bin(s).count("1"))
    left = len(reqs)
    for s in order:
        if not left:
            break
        pc = bin(s).count("1")
        for i, (zero, needs) in enumerate(reqs):
            if best[i] >= 0 or zero & ~s:
                continue
            ok = True
            for rho in range(radii):
                if needs[rho] & ~cov[rho][s]:
                    ok = False
                    break
            if ok:
                best[i] = pc
                left -= 1
    return best


def independent_profiles(n, conflict, bdist, cap):
    """Best size per boundary-distance profile over all conflict-free sets.

    ``conflict[v]`` contains ``v`` and every vertex too close to it.
    ``bdist[i][v]`` is the capped distance from boundary vertex ``i`` to ``v``.
    The profile of S is the tuple of ``min(bdist[i][S], cap)`` encoded in
    base ``cap + 1``; the result is a list indexed by profile code with -1
    for profiles no set attains.
    """
    s = len(bdist)
    base = cap + 1
    size = base ** s
    best = [-1] * size
    full = (1 << n) - 1

    def rec(cand, count, prof):
        code = 0
        for i in range(s - 1, -1, -1):
            code = code * base + prof[i]
        if count > best[code]:
            best[code] = count
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            newprof = [min(prof[i], bdist[i][v]) for i in range(s)]
            rec(cand & ~conflict[v], count + 1, newprof)

    rec(full, 0, [cap] * s)
    return best


def min_cover(n, balls, limit):
    """Smallest S whose balls cover all vertices, searched up to ``limit``.

    Returns ``(size, mask)`` or ``(-1, 0)`` when more than ``limit`` are needed.
    """
    full = (1 << n) - 1
    if n == 0:
        return 0, 0
    owners = [0] * n
    for v in range(n):
        for u in _bits(balls[v]):
            owners[u] |= 1 << v

    def rec(covered, chosen, depth):
        if covered == full:
            return chosen
        if depth == 0:
            return None
        rest = full & ~covered
        u = (rest & -rest).bit_length() - 1
        for v in _bits(owners[u]):
            got = rec(covered | balls[v], chosen | (1 << v), depth - 1)
            if got is not None:
                return got
        return None

    for k in range(0, limit + 1):
        got = rec(0, 0, k)
        if got is not None:
            return k, got
    return -1, 0


def max_packing(n, conflict):
    """Largest set with no two members in conflict. Returns ``(size, mask)``."""

    def rec(cand):
        if not cand:
            return 0, 0
        # a vertex of least conflict degree; some member of its conflict set is in an optimum
        v = min(_bits(cand), key=lambda x: bin(conflict[x] & cand).count("1"))
        best = (-1, 0)
        for u in _bits(conflict[v] & cand):
            size, mask = rec(cand & ~conflict[u])
            if size + 1 > best[0]:
                best = (size + 1, mask | (1 << u))
        return best

    return rec((1 << n) - 1)


def treewidth_dp(n, adj, last_mask, ub):
    """Exact elimination DP with ``last_mask`` eliminated last.

    Returns ``(width, order)`` for an optimal ordering of the other vertices,
    or ``(-1, None)`` if every ordering has width at least ``ub``. The width
    accounts for the final clique on ``last_mask``.
    """
    free = [v for v in range(n) if not last_mask >> v & 1]
    m = len(free)
    tail = bin(last_mask).count("1") - 1
    if tail >= ub:
        return -1, None
    size = 1 << m
    INF = 255
    tw = bytearray([INF]) * size
    pick = bytearray(size)
    tw[0] = 0
    for s in range(1, size):
        smask = 0
        for i in _bits(s):
            smask |= 1 << free[i]
        best = INF
        bv = 0
        for i in _bits(s):
            prev = s ^ (1 << i)
            pv = tw[prev]
            if pv >= ub:
                continue
            v = free[i]
            inner = smask & ~(1 << v)
            comp = 1 << v
            frontier = comp
            while frontier:
                nxt = 0
                for w in _bits(frontier):
                    nxt |= adj[w]
                nxt &= inner & ~comp
                comp |= nxt
                frontier = nxt
            reach = 0
            for w in _bits(comp):
                reach |= adj[w]
            q = bin(reach & ~smask).count("1")
            val = pv if pv > q else q
            if val < best:
                best = val
                bv = i
        if best < ub:
            tw[s] = best
            pick[s] = bv
    width = tw[size - 1]
    if width >= ub:
        return -1, None
    if tail > width:
        width = tail
    order = []
    s = size - 1
    while s:
        i = pick[s]
        order.append(free[i])
        s ^= 1 << i
    order.reverse()
    return width, order


def block_partitions(n, adj, avail, bmask, h):
    """Enumerate partial vertex models with at most ``h`` unlabeled blocks.

    Blocks are disjoint non-empty subsets of ``avail``. A block avoiding
    ``bmask`` must be connected; every component of a block meeting
    ``bmask`` must meet it. Yields ``(used_mask, key)`` where ``key`` is
    ``(descs, adjbits)``: ``descs[i]`` lists the boundary parts of block i's
    components (empty for interior blocks) and bit ``i*h+j`` of ``adjbits``
    records an edge between blocks i and j.
    """
    verts = [v for v in range(n) if avail >> v & 1]
    out = []
    blocks = [0] * h

    def comps(mask):
        res = []
        rest = mask
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
            res.append(comp)
            rest &= ~comp
        return res

    def finish(m):
        descs = []
        used = 0
        for i in range(m):
            b = blocks[i]
            used |= b
            cs = comps(b)
            if b & bmask:
                parts = []
                for c in cs:
                    part = c & bmask
                    if not part:
                        return
                    parts.append(part)
                descs.append(tuple(sorted(parts)))
            else:
                if len(cs) != 1:
                    return
                descs.append(())
        nb = [0] * m
        for i in range(m):
            for w in _bits(blocks[i]):
                nb[i] |= adj[w]
        adjbits = 0
        for i in range(m):
            for j in range(i + 1, m):
                if nb[i] & blocks[j]:
                    adjbits |= 1 << (i * h + j)
        out.append((used, (tuple(descs), adjbits)))

    def rec(idx, m):
        if idx == len(verts):
            if m:
                finish(m)
            return
        v = verts[idx]
        bit = 1 << v
        rec(idx + 1, m)
        for i in range(m):
            blocks[i] |= bit
            rec(idx + 1, m)
            blocks[i] ^= bit
        if m < h:
            blocks[m] = bit
            rec(idx + 1, m + 1)
            blocks[m] = 0

    rec(0, 0)
    return out
