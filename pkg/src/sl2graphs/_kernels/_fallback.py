"""Pure numpy versions of the compiled kernels (same signatures, same output).

Neighbor generation is vectorized over vertex ranges; BFS and component
labelling advance whole frontiers at once.
"""

import numpy as np

from .. import modp

UNREACHED = 65535


def inverse_table(p):
    return modp.inverse_table(int(p))


def schreier_neighbors(kind, p, mats, inv, start, stop):
    p = int(p)
    mats = np.asarray(mats, dtype=np.int64)
    inv = np.asarray(inv, dtype=np.int64)
    v = np.arange(start, stop, dtype=np.int64)
    k = mats.shape[0]
    out = np.empty((v.size, k), dtype=np.int32)
    if kind == 0:
        finite = v < p
        vf = np.where(finite, v, 0)
        for s, (ga, gb, gc, gd) in enumerate(mats):
            den = (gc * vf + gd) % p
            img = (ga * vf + gb) % p * inv[den] % p
            img = np.where(den == 0, p, img)
            at_inf = p if gc == 0 else ga * inv[gc] % p
            out[:, s] = np.where(finite, img, at_inf)
    elif kind == 1:
        x, y = (v + 1) // p, (v + 1) % p
        for s, (ga, gb, gc, gd) in enumerate(mats):
            out[:, s] = ((ga * x + gb * y) % p) * p + (gc * x + gd * y) % p - 1
    else:
        a, b, c, d = modp.sl2_unindex_array(v, p, inv)
        for s, (ga, gb, gc, gd) in enumerate(mats):
            na = (ga * a % p + gb * c % p) % p
            nb = (ga * b % p + gb * d % p) % p
            nc = (gc * a % p + gd * c % p) % p
            nd = (gc * b % p + gd * d % p) % p
            out[:, s] = modp.sl2_index_array(na, nb, nc, nd, p)
    out.sort(axis=1)
    return out


def perm_neighbors(perms, start, stop):
    perms = np.asarray(perms, dtype=np.int64)
    out = np.ascontiguousarray(perms[:, start:stop].T, dtype=np.int32)
    out.sort(axis=1)
    return out


def _expand(offsets, nbrs, frontier):
    lo = offsets[frontier]
    hi = offsets[frontier + 1]
    counts = hi - lo
    if counts.size == 0:
        return np.empty(0, dtype=np.int64)
    # gather the concatenated neighbor slices
    total = int(counts.sum())
    starts = np.repeat(lo - np.concatenate(([0], np.cumsum(counts)[:-1])), counts)
    return nbrs[starts + np.arange(total)].astype(np.int64)


def bfs(offsets, nbrs, source, dist):
    offsets = np.asarray(offsets)
    dist[:] = UNREACHED
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    level = 0
    while True:
        nxt = _expand(offsets, nbrs, frontier)
        nxt = nxt[dist[nxt] == UNREACHED]
        if nxt.size == 0:
            return level
        nxt = np.unique(nxt)
        level += 1
        dist[nxt] = level
        frontier = nxt


def components(offsets, nbrs):
    offsets = np.asarray(offsets)
    n = offsets.size - 1
    labels = np.full(n, -1, dtype=np.int32)
    color = np.zeros(n, dtype=np.int8)
    bip = []
    comp = 0
    seed = 0
    while True:
        unlabeled = np.flatnonzero(labels[seed:] < 0)
        if unlabeled.size == 0:
            break
        s = seed + int(unlabeled[0])
        seed = s
        labels[s] = comp
        frontier = np.array([s], dtype=np.int64)
        members = [frontier]
        while frontier.size:
            nxt = _expand(offsets, nbrs, frontier)
            nxt = np.unique(nxt[labels[nxt] < 0])
            if nxt.size == 0:
                break
            labels[nxt] = comp
            color[nxt] = 1 - color[frontier[0]]
            members.append(nxt)
            frontier = nxt
        verts = np.concatenate(members)
        lo, hi = offsets[verts], offsets[verts + 1]
        src = np.repeat(verts, hi - lo)
        dst = _expand(offsets, nbrs, verts)
        bip.append(bool(np.all(color[src] != color[dst])))
        comp += 1
    return labels, bip


def _popcount(x):
    if hasattr(np, "bitwise_count"):
        return int(np.bitwise_count(x).sum())
    return int(np.unpackbits(x.view(np.uint8)).sum())


def multi_source_bfs(offsets, nbrs, sources):
    offsets = np.asarray(offsets)
    n = offsets.size - 1
    sources = np.asarray(sources, dtype=np.int64)
    m = sources.size
    if m > 64:
        raise ValueError("at most 64 sources per call")
    bits = np.left_shift(np.uint64(1), np.arange(m, dtype=np.uint64))
    visited = np.zeros(n, dtype=np.uint64)
    np.bitwise_or.at(visited, sources, bits)
    frontier = visited.copy()
    deg = np.diff(offsets)
    rows = np.flatnonzero(deg)
    ecc = np.zeros(m, dtype=np.int64)
    counts = [m]
    level = 0
    while True:
        level += 1
        # symmetric adjacency: pushing along edges equals pulling
        nxt = np.zeros(n, dtype=np.uint64)
        if rows.size:
            nxt[rows] = np.bitwise_or.reduceat(frontier[nbrs], offsets[rows])
        nxt &= ~visited
        new = _popcount(nxt)
        if new == 0:
            break
        visited |= nxt
        active = np.bitwise_or.reduce(nxt)
        ecc[(active & bits) != 0] = level
        counts.append(new)
        frontier = nxt
    return ecc, np.array(counts, dtype=np.int64)
