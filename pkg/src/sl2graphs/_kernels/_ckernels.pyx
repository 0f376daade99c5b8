# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: neighbor generation, BFS, component labelling."""

import numpy as np
cimport numpy as cnp

cdef extern int __builtin_popcountll(unsigned long long) nogil

cnp.import_array()

ctypedef long long i64
ctypedef int i32
ctypedef unsigned short u16

cdef enum:
    UNREACHED = 65535


def inverse_table(i64 p):
    cdef cnp.ndarray[i64, ndim=1] out = np.zeros(p, dtype=np.int64)
    cdef i64[::1] inv = out
    cdef i64 i
    if p > 1:
        inv[1] = 1
    for i in range(2, p):
        inv[i] = (p - (p // i) * inv[p % i] % p) % p
    return out


cdef inline void _sort_row(i32* row, int k) nogil:
    cdef int i, j
    cdef i32 v
    for i in range(1, k):
        v = row[i]
        j = i - 1
        while j >= 0 and row[j] > v:
            row[j + 1] = row[j]
            j -= 1
        row[j + 1] = v


def schreier_neighbors(int kind, i64 p, const i64[:, ::1] mats, const i64[::1] inv,
                       i64 start, i64 stop):
    """Sorted neighbor rows for vertices ``start..stop-1`` of an SL2 space.

    kind: 0 projective, 1 affine, 2 full group (left multiplication).
    """
    cdef int k = mats.shape[0]
    cdef i64 m = stop - start
    out_arr = np.empty((m, k), dtype=np.int32)
    cdef i32[:, ::1] out = out_arr
    cdef i64 v, x, y, den, split = (p - 1) * p * p, r
    cdef i64 a, b, c, d, ga, gb, gc, gd, na, nb, nc, nd
    cdef int s
    with nogil:
        for v in range(start, stop):
            if kind == 0:
                for s in range(k):
                    ga = mats[s, 0]; gb = mats[s, 1]; gc = mats[s, 2]; gd = mats[s, 3]
                    if v == p:
                        out[v - start, s] = <i32>(p if gc == 0 else ga * inv[gc] % p)
                    else:
                        den = (gc * v + gd) % p
                        if den == 0:
                            out[v - start, s] = <i32>p
                        else:
                            out[v - start, s] = <i32>((ga * v + gb) % p * inv[den] % p)
            elif kind == 1:
                x = (v + 1) // p
                y = (v + 1) % p
                for s in range(k):
                    ga = mats[s, 0]; gb = mats[s, 1]; gc = mats[s, 2]; gd = mats[s, 3]
                    out[v - start, s] = <i32>(((ga * x + gb * y) % p) * p + (gc * x + gd * y) % p - 1)
            else:
                if v < split:
                    a = v // (p * p) + 1
                    r = v % (p * p)
                    b = r // p
                    c = r % p
                    d = (1 + b * c % p) % p * inv[a] % p
                else:
                    r = v - split
                    a = 0
                    b = r // p + 1
                    d = r % p
                    c = (p - inv[b]) % p
                for s in range(k):
                    ga = mats[s, 0]; gb = mats[s, 1]; gc = mats[s, 2]; gd = mats[s, 3]
                    na = (ga * a % p + gb * c % p) % p
                    nb = (ga * b % p + gb * d % p) % p
                    nc = (gc * a % p + gd * c % p) % p
                    nd = (gc * b % p + gd * d % p) % p
                    if na != 0:
                        out[v - start, s] = <i32>(((na - 1) * p + nb) * p + nc)
                    else:
                        out[v - start, s] = <i32>(split + (nb - 1) * p + nd)
            _sort_row(&out[v - start, 0], k)
    return out_arr


def perm_neighbors(const i64[:, ::1] perms, i64 start, i64 stop):
    cdef int k = perms.shape[0]
    out_arr = np.empty((stop - start, k), dtype=np.int32)
    cdef i32[:, ::1] out = out_arr
    cdef i64 v
    cdef int s
    with nogil:
        for v in range(start, stop):
            for s in range(k):
                out[v - start, s] = <i32>perms[s, v]
            _sort_row(&out[v - start, 0], k)
    return out_arr


def bfs(const i64[::1] offsets, const i32[::1] nbrs, i64 source, u16[::1] dist):
    """Fill ``dist`` with hop distances from ``source``; return the eccentricity
    within the reached component.  Unreached vertices keep 65535."""
    cdef i64 n = dist.shape[0]
    cdef i64 i, head = 0, tail = 0, u, w, e
    cdef u16 du
    cdef i32[::1] queue = np.empty(n, dtype=np.int32)
    with nogil:
        for i in range(n):
            dist[i] = UNREACHED
        dist[source] = 0
        queue[tail] = <i32>source
        tail += 1
        du = 0
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            for e in range(offsets[u], offsets[u + 1]):
                w = nbrs[e]
                if dist[w] == UNREACHED:
                    dist[w] = du + 1
                    queue[tail] = <i32>w
                    tail += 1
    return int(du)


def components(const i64[::1] offsets, const i32[::1] nbrs):
    """Component labels (by BFS order of discovery) and per-component
    bipartiteness from a 2-colouring."""
    cdef i64 n = offsets.shape[0] - 1
    labels_arr = np.full(n, -1, dtype=np.int32)
    color_arr = np.zeros(n, dtype=np.int8)
    cdef i32[::1] labels = labels_arr
    cdef signed char[::1] color = color_arr
    cdef i32[::1] queue = np.empty(max(n, 1), dtype=np.int32)
    bip = []
    cdef i64 s, head, tail, u, w, e
    cdef i32 comp = 0
    cdef bint ok
    for s in range(n):
        if labels[s] >= 0:
            continue
        ok = True
        with nogil:
            head = 0
            tail = 1
            queue[0] = <i32>s
            labels[s] = comp
            color[s] = 0
            while head < tail:
                u = queue[head]
                head += 1
                for e in range(offsets[u], offsets[u + 1]):
                    w = nbrs[e]
                    if labels[w] < 0:
                        labels[w] = comp
                        color[w] = 1 - color[u]
                        queue[tail] = <i32>w
                        tail += 1
                    elif color[w] == color[u]:
                        ok = False
        bip.append(bool(ok))
        comp += 1
    return labels_arr, bip


ctypedef unsigned long long u64


def multi_source_bfs(const i64[::1] offsets, const i32[::1] nbrs, const i64[::1] sources):
    """Bit-parallel BFS from up to 64 sources at once.

    Returns (ecc, counts): per-source eccentricity within its component and
    ``counts[h]`` = number of (source, vertex) pairs at distance h.
    """
    cdef i64 n = offsets.shape[0] - 1
    cdef int m = sources.shape[0]
    if m > 64:
        raise ValueError("at most 64 sources per call")
    cdef u64[::1] visited = np.zeros(n, dtype=np.uint64)
    cdef u64[::1] frontier = np.zeros(n, dtype=np.uint64)
    cdef u64[::1] nxt = np.zeros(n, dtype=np.uint64)
    cdef u64[::1] tmp
    ecc_arr = np.zeros(m, dtype=np.int64)
    cdef i64[::1] ecc = ecc_arr
    counts = [m]
    cdef i64 u, e, level = 0, newcount
    cdef u64 f, active, bits
    cdef int s
    for s in range(m):
        visited[sources[s]] |= (<u64>1) << s
        frontier[sources[s]] |= (<u64>1) << s
    while True:
        level += 1
        newcount = 0
        active = 0
        with nogil:
            for u in range(n):
                nxt[u] = 0
            for u in range(n):
                f = frontier[u]
                if f:
                    for e in range(offsets[u], offsets[u + 1]):
                        nxt[nbrs[e]] |= f
            for u in range(n):
                bits = nxt[u] & ~visited[u]
                nxt[u] = bits
                if bits:
                    visited[u] |= bits
                    active |= bits
                    newcount += __builtin_popcountll(bits)
        if newcount == 0:
            break
        for s in range(m):
            if (active >> s) & 1:
                ecc[s] = level
        counts.append(newcount)
        tmp = frontier
        frontier = nxt
        nxt = tmp
    return ecc_arr, np.array(counts, dtype=np.int64)
