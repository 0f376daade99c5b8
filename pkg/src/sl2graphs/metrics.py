"""Distances on Schreier graphs: BFS, eccentricity, diameter, girth."""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass

import numpy as np

from . import _kernels, rng
from .errors import ConfigError, NotConnected
from .graph import SchreierGraph
from .groups import GeneratorSet

UNREACHED = _kernels.UNREACHED
EXACT_PAIRS_LIMIT = 5000


@dataclass(eq=False)
class DistanceField:
    source: int
    dist: np.ndarray  # uint16, UNREACHED for other components
    eccentricity: int

    @property
    def reached(self) -> int:
        return int(np.count_nonzero(self.dist != UNREACHED))

    @property
    def complete(self) -> bool:
        return self.reached == self.dist.size

    def level_counts(self) -> np.ndarray:
        d = self.dist[self.dist != UNREACHED]
        return np.bincount(d, minlength=self.eccentricity + 1)


def bfs(graph: SchreierGraph, source: int, *, out: np.ndarray | None = None,
        backend=None) -> DistanceField:
    """Hop distances from ``source``; self-loops and parallel edges are inert."""
    if not 0 <= source < graph.n:
        raise ConfigError(f"source {source} out of range")
    dist = np.empty(graph.n, dtype=np.uint16) if out is None else out
    ecc = _kernels.get(backend).bfs(graph.offsets, graph.neighbors, int(source), dist)
    return DistanceField(int(source), dist, int(ecc))


def _connected_field(graph, v, out=None, backend=None) -> DistanceField:
    field = bfs(graph, v, out=out, backend=backend)
    if not field.complete:
        raise NotConnected(f"{graph.n - field.reached} vertices unreachable from {v}")
    return field


def eccentricity(graph: SchreierGraph, v: int, *, backend=None) -> int:
    return _connected_field(graph, v, backend=backend).eccentricity


def radius_at(graph: SchreierGraph, v: int = 0, *, backend=None) -> int:
    """Eccentricity of the given centre (index 0 is z = 0 on the projective line)."""
    return eccentricity(graph, v, backend=backend)


def _midpoint(dist_a, dist_b, length):
    on_path = (dist_a.astype(np.int64) + dist_b == length) & (dist_a == length // 2)
    return int(np.flatnonzero(on_path)[0])


@dataclass
class DiameterResult:
    diameter: int
    bfs_calls: int
    method: str


def eccentricities(graph: SchreierGraph, vertices, *, backend=None) -> np.ndarray:
    """Eccentricities of many vertices, 64 at a time with bit-parallel BFS."""
    kern = _kernels.get(backend)
    vertices = np.asarray(vertices, dtype=np.int64)
    out = np.empty(vertices.size, dtype=np.int64)
    for lo in range(0, vertices.size, 64):
        batch = vertices[lo:lo + 64]
        ecc, counts = kern.multi_source_bfs(graph.offsets, graph.neighbors, batch)
        if counts.sum() != graph.n * batch.size:
            raise NotConnected("graph is not connected")
        out[lo:lo + batch.size] = ecc
    return out


def ifub(graph: SchreierGraph, *, backend=None) -> DiameterResult:
    """Exact diameter by iterative fringe upper bounding.

    A 4-sweep picks a central start u.  Processing the BFS levels of u from
    the outside in, every vertex in level i has eccentricity at most 2i, so
    once the largest eccentricity found exceeds 2(i-1) it is the diameter.
    Fringe eccentricities are computed 64 vertices per bit-parallel pass.
    """
    n = graph.n
    bufs = [np.empty(n, dtype=np.uint16) for _ in range(2)]
    calls = 0

    def run(v, slot):
        nonlocal calls
        calls += 1
        return _connected_field(graph, v, out=bufs[slot], backend=backend)

    # 4-sweep
    lb = 0
    r = 0
    for _ in range(2):
        fa = run(r, 0)
        a = int(np.argmax(fa.dist))
        fa = run(a, 0)
        b = int(np.argmax(fa.dist))
        lb = max(lb, fa.eccentricity)
        fb = run(b, 1)
        r = _midpoint(fa.dist, fb.dist, fa.eccentricity)
    root = run(r, 0)
    levels = root.dist.copy()
    i = root.eccentricity
    lb = max(lb, i)
    ub = 2 * i
    while ub > lb:
        fringe = np.flatnonzero(levels == i)
        bi = 0
        for lo in range(0, fringe.size, 64):
            batch = fringe[lo:lo + 64]
            calls += batch.size
            bi = max(bi, int(eccentricities(graph, batch, backend=backend).max()))
            if max(lb, bi) > 2 * (i - 1):
                return DiameterResult(max(lb, bi), calls, "ifub")
        lb = max(lb, bi)
        ub = 2 * (i - 1)
        i -= 1
    return DiameterResult(lb, calls, "ifub")


def all_source_diameter(graph: SchreierGraph, *, backend=None) -> int:
    return int(eccentricities(graph, np.arange(graph.n), backend=backend).max())


def diameter(graph: SchreierGraph, transitive_hint: bool = False, *, backend=None) -> int:
    """Exact diameter.  With ``transitive_hint`` (Cayley graphs) one BFS from
    vertex 0 suffices; otherwise iFUB."""
    if transitive_hint:
        return eccentricity(graph, 0, backend=backend)
    return ifub(graph, backend=backend).diameter


def moore_lower_bound(n: int, k: int) -> int:
    """Smallest D with 1 + k * sum_{i<D} (k-1)^i >= n, for k >= 3."""
    if k < 3:
        raise ConfigError("Moore bound needs k >= 3")
    d, reach, layer = 0, 1, k
    while reach < n:
        reach += layer
        layer *= k - 1
        d += 1
    return d


def distance_distribution(graph: SchreierGraph, sources=None, *, backend=None) -> np.ndarray:
    """``counts[h]`` = number of ordered pairs (s, v), v != s, at distance h,
    over the given sources (all vertices by default)."""
    kern = _kernels.get(backend)
    srcs = np.arange(graph.n) if sources is None else np.asarray(sources, dtype=np.int64)
    counts = np.zeros(1, dtype=np.int64)
    for lo in range(0, srcs.size, 64):
        batch = srcs[lo:lo + 64]
        _, lc = kern.multi_source_bfs(graph.offsets, graph.neighbors, batch)
        if lc.sum() != graph.n * batch.size:
            raise NotConnected("graph is not connected")
        if lc.size > counts.size:
            counts = np.pad(counts, (0, lc.size - counts.size))
        counts[:lc.size] += lc
    counts[0] -= srcs.size
    return counts


def essential_diameter(graph: SchreierGraph, q: float = 0.99, sample_pairs: int = 200,
                       seed: int = 0, *, exact_limit: int = EXACT_PAIRS_LIMIT,
                       backend=None) -> int:
    """Smallest h such that at least a q-fraction of vertex pairs lie at
    distance strictly less than h.

    Exact over all ordered pairs of distinct vertices when n <= exact_limit;
    otherwise ``sample_pairs`` uniform sources, each with a full BFS.
    """
    if not 0 < q < 1:
        raise ConfigError("q must lie in (0, 1)")
    if graph.n <= exact_limit:
        counts = distance_distribution(graph, backend=backend)
    else:
        gen = rng.stream(seed, graph.n, 0)
        counts = distance_distribution(graph, gen.integers(0, graph.n, size=sample_pairs),
                                       backend=backend)
    total = counts.sum()
    if total == 0:
        return 1
    below = np.cumsum(counts)  # below[h] = pairs with distance <= h
    h = int(np.searchsorted(below, q * total, side="left"))
    return h + 1


def write_distance_csv(counts, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["distance", "pair_count"])
        for h, c in enumerate(counts):
            w.writerow([h, int(c)])


# --- girth ---------------------------------------------------------------

@dataclass
class GirthResult:
    """Relator lengths found by :func:`girth_at_identity`.

    ``relator_length`` counts involution degeneracies: a letter equal to its
    own inverse gives the relator s*s of length 2.  ``reduced_length`` is the
    shortest reduced word (no s*s^-1 and no s*s for self-paired letters),
    i.e. the girth with those degenerate 2-cycles removed.  A value of None
    means nothing was found within the exploration budget.
    """
    relator_length: int | None
    reduced_length: int | None
    simple_girth: int | None  # shortest cycle once duplicate letters are merged
    minus_identity_length: int | None  # shortest word equal to -id
    modulo_sign: bool
    explored: int
    involutions: int = 0

    @property
    def plus_minus_length(self) -> int | None:
        """Shortest nontrivial word equal to +id or -id."""
        vals = [v for v in (self.relator_length, self.minus_identity_length) if v]
        return min(vals) if vals else None


def _mul(g, h, p):
    a, b, c, d = g
    e, f, gg, hh = h
    return ((a * e + b * gg) % p, (a * f + b * hh) % p, (c * e + d * gg) % p, (c * f + d * hh) % p)


def _canon(m, p, modulo_sign):
    if not modulo_sign:
        return m
    neg = tuple((-x) % p for x in m)
    return min(m, neg)


def _letter_girth(letters, inverse_of, p, modulo_sign, max_vertices):
    ident = _canon((1, 0, 0, 1), p, modulo_sign)
    seen = {ident: (0, -1)}  # element -> (distance, last letter)
    queue = deque([ident])
    best = None
    while queue:
        u = queue.popleft()
        r, last = seen[u]
        if best is not None and 2 * r >= best:
            break
        back = inverse_of[last] if last >= 0 else -1
        for s, g in enumerate(letters):
            if s == back:
                continue
            v = _canon(_mul(g, u, p), p, modulo_sign)
            if v not in seen:
                if len(seen) >= max_vertices:
                    return best, len(seen)
                seen[v] = (r + 1, s)
                queue.append(v)
            elif not (seen[v][0] == r + 1 and seen[v][1] == s and _canon(_mul(letters[inverse_of[s]], v, p), p, modulo_sign) == u):
                cand = r + seen[v][0] + 1
                best = cand if best is None else min(best, cand)
    return best, len(seen)


def _simple_girth(elements, p, modulo_sign, max_vertices):
    uniq = []
    ident = _canon((1, 0, 0, 1), p, modulo_sign)
    for g in elements:
        g = _canon(g, p, modulo_sign)
        if g != ident and g not in uniq:
            uniq.append(g)
    seen = {ident: (0, None)}  # element -> (distance, parent)
    queue = deque([ident])
    best = None
    while queue:
        u = queue.popleft()
        r, parent = seen[u]
        if best is not None and 2 * r >= best:
            break
        nbrs = {_canon(_mul(g, u, p), p, modulo_sign) for g in uniq}
        nbrs.discard(u)
        for v in nbrs:
            if v == parent:
                continue
            if v not in seen:
                if len(seen) >= max_vertices:
                    return best
                seen[v] = (r + 1, u)
                queue.append(v)
            elif seen[v][1] != u:
                cand = r + seen[v][0] + 1
                best = cand if best is None else min(best, cand)
    return best


def _distance_to(target, elements, p, max_vertices):
    ident = (1, 0, 0, 1)
    if target == ident:
        return 0
    seen = {ident}
    frontier = [ident]
    depth = 0
    while frontier and len(seen) < max_vertices:
        depth += 1
        nxt = []
        for u in frontier:
            for g in elements:
                v = _mul(g, u, p)
                if v == target:
                    return depth
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return None


def girth_at_identity(gens: GeneratorSet, *, modulo_sign: bool | None = None,
                      max_vertices: int = 2_000_000) -> GirthResult:
    """Shortest nontrivial relator of the generator letters, by BFS in the
    Cayley graph from the identity (explored lazily, so p can be large).

    ``modulo_sign`` works in PSL2; it defaults to True for sets that are only
    symmetric up to sign (LPS), where each letter is then an involution and
    ``relator_length`` is then 2 by convention while ``reduced_length``
    gives the first relator that is not such a degeneracy.  The simple girth
    merges coinciding letters and ignores loops, so it is always >= 3.
    The distance to -id is searched only outside PSL2, up to ``max_vertices``
    group elements.
    """
    if gens.is_permutation:
        raise ConfigError("girth is implemented for SL2 generator sets")
    if modulo_sign is None:
        modulo_sign = gens.projective
    p = gens.p
    letters = [g.entries for g in gens.elements]
    ident = _canon((1, 0, 0, 1), p, modulo_sign)
    invol = sum(1 for g in letters if _canon(_mul(g, g, p), p, modulo_sign) == ident)
    reduced, explored = _letter_girth(letters, gens.inverse_of, p, modulo_sign, max_vertices)
    rel = 2 if invol else reduced
    simple = _simple_girth(letters, p, modulo_sign, max_vertices)
    minus = None
    if not modulo_sign:
        minus = _distance_to((p - 1, 0, 0, p - 1), letters, p, max_vertices)
    return GirthResult(rel, reduced, simple, minus, modulo_sign, explored, invol)


def graph_girth(graph: SchreierGraph) -> int | None:
    """Simple-graph girth of an explicit graph (loops and parallel edges
    ignored); used as an oracle for :func:`girth_at_identity`."""
    best = None
    for s in range(graph.n):
        dist = {s: 0}
        parent = {s: -1}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            if best is not None and 2 * dist[u] >= best:
                break
            for v in set(int(x) for x in graph.neighbors_of(u)):
                if v == u or v == parent[u]:
                    continue
                if v not in dist:
                    dist[v] = dist[u] + 1
                    parent[v] = u
                    queue.append(v)
                elif parent[v] != u:
                    cand = dist[u] + dist[v] + 1
                    best = cand if best is None else min(best, cand)
    return best
