# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_kernels_py`` for the contracts."""

from libc.stdlib cimport malloc, free, calloc

ctypedef unsigned long long u64

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


cdef inline int popcount(u64 x) nogil:
    return __builtin_popcountll(x)


cdef inline int lowbit_index(u64 x) nogil:
    return __builtin_ctzll(x)


def bfs_all(int n, adj):
    cdef u64 *a = <u64 *> malloc(max(n, 1) * sizeof(u64))
    cdef int s, d, w
    cdef u64 seen, frontier, nxt, f
    out = []
    for s in range(n):
        a[s] = adj[s]
    try:
        for s in range(n):
            dist = [-1] * n
            dist[s] = 0
            seen = (<u64> 1) << s
            frontier = seen
            d = 0
            while frontier:
                d += 1
                nxt = 0
                f = frontier
                while f:
                    w = lowbit_index(f)
                    f &= f - 1
                    nxt |= a[w]
                nxt &= ~seen
                f = nxt
                while f:
                    w = lowbit_index(f)
                    f &= f - 1
                    dist[w] = d
                seen |= nxt
                frontier = nxt
            out.append(dist)
    finally:
        free(a)
    return out


def ds_table(int n, balls, reqs):
    cdef int radii = len(balls)
    cdef int nreq = len(reqs)
    cdef long full = (<long> 1) << n
    cdef u64 *ball = <u64 *> malloc(max(radii * n, 1) * sizeof(u64))
    cdef u64 *cov = <u64 *> malloc(radii * full * sizeof(u64))
    cdef u64 *zero = <u64 *> malloc(max(nreq, 1) * sizeof(u64))
    cdef u64 *need = <u64 *> malloc(max(nreq * radii, 1) * sizeof(u64))
    cdef int *best = <int *> malloc(max(nreq, 1) * sizeof(int))
    cdef long s, prev
    cdef int v, rho, i, pc, left, ok
    cdef u64 low
    try:
        for rho in range(radii):
            for v in range(n):
                ball[rho * n + v] = balls[rho][v]
        for i in range(nreq):
            zero[i] = reqs[i][0]
            for rho in range(radii):
                need[i * radii + rho] = reqs[i][1][rho]
            best[i] = -1
        for rho in range(radii):
            cov[rho * full] = 0
        for s in range(1, full):
            low = (<u64> s) & (-(<u64> s))
            v = lowbit_index(low)
            prev = s ^ <long> low
            for rho in range(radii):
                cov[rho * full + s] = cov[rho * full + prev] | ball[rho * n + v]
        left = nreq
        for pc in range(n + 1):
            if left == 0:
                break
            for s in range(full):
                if popcount(<u64> s) != pc:
                    continue
                for i in range(nreq):
                    if best[i] >= 0 or (zero[i] & ~(<u64> s)):
                        continue
                    ok = 1
                    for rho in range(radii):
                        if need[i * radii + rho] & ~cov[rho * full + s]:
                            ok = 0
                            break
                    if ok:
                        best[i] = pc
                        left -= 1
        return [best[i] for i in range(nreq)]
    finally:
        free(ball)
        free(cov)
        free(zero)
        free(need)
        free(best)


cdef struct ProfCtx:
    int s
    int base
    int n
    u64 *conflict
    int *bdist
    int *best


cdef void _prof_rec(ProfCtx *ctx, u64 cand, int count, int *prof) nogil:
    cdef int code = 0
    cdef int i, v
    cdef u64 low
    cdef int newprof[8]
    for i in range(ctx.s - 1, -1, -1):
        code = code * ctx.base + prof[i]
    if count > ctx.best[code]:
        ctx.best[code] = count
    while cand:
        low = cand & (-cand)
        v = lowbit_index(low)
        cand ^= low
        for i in range(ctx.s):
            newprof[i] = prof[i]
            if ctx.bdist[i * ctx.n + v] < newprof[i]:
                newprof[i] = ctx.bdist[i * ctx.n + v]
        _prof_rec(ctx, cand & ~ctx.conflict[v], count + 1, newprof)


def independent_profiles(int n, conflict, bdist, int cap):
    cdef int s = len(bdist)
    if s > 8:
        raise ValueError("at most 8 boundary vertices")
    cdef int base = cap + 1
    cdef int size = 1
    cdef int i, v
    for i in range(s):
        size *= base
    cdef ProfCtx ctx
    cdef int prof[8]
    ctx.s = s
    ctx.base = base
    ctx.n = n
    ctx.conflict = <u64 *> malloc(max(n, 1) * sizeof(u64))
    ctx.bdist = <int *> malloc(max(s * n, 1) * sizeof(int))
    ctx.best = <int *> malloc(size * sizeof(int))
    try:
        for v in range(n):
            ctx.conflict[v] = conflict[v]
        for i in range(s):
            prof[i] = cap
            for v in range(n):
                ctx.bdist[i * n + v] = bdist[i][v]
        for i in range(size):
            ctx.best[i] = -1
        _prof_rec(&ctx, ((<u64> 1) << n) - 1 if n < 64 else <u64> -1, 0, prof)
        return [ctx.best[i] for i in range(size)]
    finally:
        free(ctx.conflict)
        free(ctx.bdist)
        free(ctx.best)


cdef u64 _cover_rec(u64 *balls, u64 *owners, u64 full, u64 covered, u64 chosen, int depth) nogil:
    cdef u64 rest, cand, low, got
    cdef int u, v
    if covered == full:
        return chosen | ((<u64> 1) << 63)
    if depth == 0:
        return 0
    rest = full & ~covered
    u = lowbit_index(rest)
    cand = owners[u]
    while cand:
        low = cand & (-cand)
        v = lowbit_index(low)
        cand ^= low
        got = _cover_rec(balls, owners, full, covered | balls[v], chosen | low, depth - 1)
        if got:
            return got
    return 0


def min_cover(int n, balls, int limit):
    if n == 0:
        return 0, 0
    if n > 62:
        raise ValueError("too many vertices")
    cdef u64 *b = <u64 *> malloc(n * sizeof(u64))
    cdef u64 *owners = <u64 *> calloc(n, sizeof(u64))
    cdef u64 full = ((<u64> 1) << n) - 1
    cdef u64 got, x
    cdef int v, u, k
    try:
        for v in range(n):
            b[v] = balls[v]
            x = b[v]
            while x:
                u = lowbit_index(x)
                x &= x - 1
                owners[u] |= (<u64> 1) << v
        for k in range(limit + 1):
            got = _cover_rec(b, owners, full, 0, 0, k)
            if got:
                return k, int(got & ~((<u64> 1) << 63))
        return -1, 0
    finally:
        free(b)
        free(owners)


cdef int _pack_rec(u64 *conflict, u64 cand, u64 *outmask) nogil:
    cdef u64 x, low, opts, submask
    cdef int v, u, deg, bestdeg, size, best
    if cand == 0:
        outmask[0] = 0
        return 0
    bestdeg = 1000
    v = 0
    x = cand
    while x:
        u = lowbit_index(x)
        x &= x - 1
        deg = popcount(conflict[u] & cand)
        if deg < bestdeg:
            bestdeg = deg
            v = u
    best = -1
    opts = conflict[v] & cand
    while opts:
        low = opts & (-opts)
        u = lowbit_index(low)
        opts ^= low
        size = _pack_rec(conflict, cand & ~conflict[u], &submask) + 1
        if size > best:
            best = size
            outmask[0] = submask | low
    return best


def max_packing(int n, conflict):
    if n == 0:
        return 0, 0
    if n > 63:
        raise ValueError("too many vertices")
    cdef u64 *c = <u64 *> malloc(n * sizeof(u64))
    cdef u64 mask = 0
    cdef int v, size
    try:
        for v in range(n):
            c[v] = conflict[v]
        size = _pack_rec(c, ((<u64> 1) << n) - 1, &mask)
        return size, int(mask)
    finally:
        free(c)


def treewidth_dp(int n, adj, u64 last_mask, int ub):
    cdef int free_idx[64]
    cdef int m = 0
    cdef int v, i, w
    for v in range(n):
        if not (last_mask >> v) & 1:
            free_idx[m] = v
            m += 1
    cdef int tail = popcount(last_mask) - 1
    if tail >= ub:
        return -1, None
    if m > 26:
        raise ValueError("too many vertices for the exact treewidth table")
    cdef u64 *a = <u64 *> malloc(max(n, 1) * sizeof(u64))
    cdef long size = (<long> 1) << m
    cdef unsigned char *tw = <unsigned char *> malloc(size)
    cdef unsigned char *pick = <unsigned char *> malloc(size)
    cdef long s, prev
    cdef u64 smask, inner, comp, frontier, nxt, reach, x
    cdef int best, bv, pv, q, val, width
    try:
        for v in range(n):
            a[v] = adj[v]
        tw[0] = 0
        for s in range(1, size):
            smask = 0
            x = <u64> s
            while x:
                i = lowbit_index(x)
                x &= x - 1
                smask |= (<u64> 1) << free_idx[i]
            best = 255
            bv = 0
            x = <u64> s
            while x:
                i = lowbit_index(x)
                x &= x - 1
                prev = s ^ ((<long> 1) << i)
                pv = tw[prev]
                if pv >= ub or pv >= best:
                    continue
                v = free_idx[i]
                inner = smask & ~((<u64> 1) << v)
                comp = (<u64> 1) << v
                frontier = comp
                while frontier:
                    nxt = 0
                    while frontier:
                        w = lowbit_index(frontier)
                        frontier &= frontier - 1
                        nxt |= a[w]
                    nxt &= inner & ~comp
                    comp |= nxt
                    frontier = nxt
                reach = 0
                frontier = comp
                while frontier:
                    w = lowbit_index(frontier)
                    frontier &= frontier - 1
                    reach |= a[w]
                q = popcount(reach & ~smask)
                val = pv if pv > q else q
                if val < best:
                    best = val
                    bv = i
            if best < ub:
                tw[s] = best
                pick[s] = bv
            else:
                tw[s] = 255
        width = tw[size - 1]
        if width >= ub:
            return -1, None
        if tail > width:
            width = tail
        order = []
        s = size - 1
        while s:
            i = pick[s]
            order.append(free_idx[i])
            s ^= (<long> 1) << i
        order.reverse()
        return width, order
    finally:
        free(a)
        free(tw)
        free(pick)


cdef class _Parts:
    cdef int n
    cdef int h
    cdef int nv
    cdef u64 bmask
    cdef u64 adj[64]
    cdef int verts[64]
    cdef u64 blocks[16]
    cdef list out

    cdef u64 _component(self, u64 start, u64 within):
        cdef u64 comp = start
        cdef u64 frontier = start
        cdef u64 nxt
        cdef int w
        while frontier:
            nxt = 0
            while frontier:
                w = lowbit_index(frontier)
                frontier &= frontier - 1
                nxt |= self.adj[w]
            nxt &= within & ~comp
            comp |= nxt
            frontier = nxt
        return comp

    cdef void _finish(self, int m):
        cdef int i, j, w
        cdef u64 b, rest, comp, part, used = 0, nbm
        cdef u64 nb[16]
        cdef u64 parts[64]
        cdef int np, k, l
        cdef u64 tmp
        cdef u64 adjbits = 0
        descs = []
        for i in range(m):
            b = self.blocks[i]
            used |= b
            if b & self.bmask:
                np = 0
                rest = b
                while rest:
                    comp = self._component(rest & (-rest), b)
                    rest &= ~comp
                    part = comp & self.bmask
                    if part == 0:
                        return
                    parts[np] = part
                    np += 1
                for k in range(1, np):
                    l = k
                    while l > 0 and parts[l - 1] > parts[l]:
                        tmp = parts[l]
                        parts[l] = parts[l - 1]
                        parts[l - 1] = tmp
                        l -= 1
                descs.append(tuple([int(parts[k]) for k in range(np)]))
            else:
                comp = self._component(b & (-b), b)
                if comp != b:
                    return
                descs.append(())
        for i in range(m):
            nbm = 0
            b = self.blocks[i]
            while b:
                w = lowbit_index(b)
                b &= b - 1
                nbm |= self.adj[w]
            nb[i] = nbm
        for i in range(m):
            for j in range(i + 1, m):
                if nb[i] & self.blocks[j]:
                    adjbits |= (<u64> 1) << (i * self.h + j)
        self.out.append((int(used), (tuple(descs), int(adjbits))))

    cdef void _rec(self, int idx, int m):
        cdef u64 bit
        cdef int i
        if idx == self.nv:
            if m:
                self._finish(m)
            return
        bit = (<u64> 1) << self.verts[idx]
        self._rec(idx + 1, m)
        for i in range(m):
            self.blocks[i] |= bit
            self._rec(idx + 1, m)
            self.blocks[i] ^= bit
        if m < self.h:
            self.blocks[m] = bit
            self._rec(idx + 1, m + 1)
            self.blocks[m] = 0


def block_partitions(int n, adj, u64 avail, u64 bmask, int h):
    if n > 64 or h > 8:
        raise ValueError("instance too large for block enumeration")
    cdef _Parts p = _Parts()
    cdef int v
    p.n = n
    p.h = h
    p.bmask = bmask
    p.nv = 0
    p.out = []
    for v in range(n):
        p.adj[v] = adj[v]
        if (avail >> v) & 1:
            p.verts[p.nv] = v
            p.nv += 1
    for v in range(16):
        p.blocks[v] = 0
    p._rec(0, 0)
    return p.out
