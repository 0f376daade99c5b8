"""Schreier multigraphs in compressed adjacency form.

A graph built from a symmetric generator set on a vertex space stores, for
each vertex x, the sorted multiset ``{s.x : s in S}``.  Fixed points become
self-loops and coinciding images become parallel edges, so every vertex has
exactly ``k = |S|`` endpoint slots and the adjacency matrix
``A[x', x] = #{s : s.x = x'}`` has all row sums equal to k.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .errors import ConfigError, SizeOverflow
from .groups import GeneratorSet, SpaceKind, VertexSpace

DEFAULT_MEMORY_BUDGET = int(os.environ.get("SL2GRAPHS_MEMORY_BUDGET", 4 * 2**30))
_CHUNK = 1 << 21

MAGIC = b"SL2GRAPH"
_HEADER = struct.Struct("<8sQQIQ")  # magic, n, k, space kind, p or n


@dataclass(eq=False)
class SchreierGraph:
    n: int
    k: int | None  # common degree; None for irregular test graphs
    offsets: np.ndarray  # int64, length n + 1
    neighbors: np.ndarray  # int32, length offsets[-1]
    space: VertexSpace | None = None
    generators: GeneratorSet | None = None
    _labels: tuple | None = field(default=None, repr=False)

    @classmethod
    def from_neighbor_lists(cls, lists, space=None, generators=None) -> "SchreierGraph":
        """Build from explicit per-vertex neighbor multisets (small graphs)."""
        degrees = np.array([len(x) for x in lists], dtype=np.int64)
        offsets = np.concatenate(([0], np.cumsum(degrees))).astype(np.int64)
        flat = [int(v) for row in lists for v in sorted(row)]
        nbrs = np.array(flat, dtype=np.int32)
        k = int(degrees[0]) if degrees.size and np.all(degrees == degrees[0]) else None
        if degrees.size == 0:
            k = 0
        return cls(len(lists), k, offsets, nbrs, space, generators)

    @classmethod
    def from_edges(cls, n: int, edges) -> "SchreierGraph":
        """Undirected (multi)graph; a loop (u, u) contributes two endpoints."""
        lists = [[] for _ in range(n)]
        for u, v in edges:
            lists[u].append(v)
            lists[v].append(u)
        return cls.from_neighbor_lists(lists)

    def neighbors_of(self, v: int) -> np.ndarray:
        return self.neighbors[self.offsets[v]:self.offsets[v + 1]]

    @property
    def is_regular(self) -> bool:
        return self.k is not None

    def adjacency(self, dtype=np.float64) -> sp.csr_matrix:
        """Sparse adjacency; parallel entries are summed."""
        data = np.ones(self.neighbors.size, dtype=dtype)
        # scipy may reuse the index buffers and sum_duplicates rewrites them in place
        mat = sp.csr_matrix((data, self.neighbors.copy(), self.offsets.copy()),
                            shape=(self.n, self.n))
        mat.sum_duplicates()
        return mat

    def dense(self, dtype=np.float64) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=dtype)
        rows = np.repeat(np.arange(self.n), np.diff(self.offsets))
        np.add.at(a, (rows, self.neighbors), 1)
        return a

    def self_loop_count(self) -> int:
        rows = np.repeat(np.arange(self.n), np.diff(self.offsets))
        return int(np.count_nonzero(rows == self.neighbors))

    # -- connectivity ----------------------------------------------------
    def _components(self):
        if self._labels is None:
            labels, bip = _kernels.backend.components(self.offsets, self.neighbors)
            self._labels = (labels, bip)
        return self._labels

    def component_labels(self) -> np.ndarray:
        return self._components()[0]

    # -- persistence -----------------------------------------------------
    def save(self, path) -> None:
        """Binary dump: header, int64 LE offsets, int32 LE neighbors."""
        kind = int(self.space.kind) if self.space is not None else 255
        size = self.space.size if self.space is not None else 0
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, self.n, self.k or 0, kind, size))
            fh.write(self.offsets.astype("<i8").tobytes())
            fh.write(self.neighbors.astype("<i4").tobytes())

    @classmethod
    def load(cls, path) -> "SchreierGraph":
        with open(path, "rb") as fh:
            magic, n, k, kind, size = _HEADER.unpack(fh.read(_HEADER.size))
            if magic != MAGIC:
                raise ConfigError(f"{path}: not a graph dump")
            offsets = np.frombuffer(fh.read(8 * (n + 1)), dtype="<i8").astype(np.int64)
            nbrs = np.frombuffer(fh.read(4 * int(offsets[-1])), dtype="<i4").astype(np.int32)
        space = VertexSpace(SpaceKind(kind), size) if kind != 255 else None
        degrees = np.diff(offsets)
        k = int(k) if degrees.size and np.all(degrees == k) else None
        return cls(int(n), k, offsets, nbrs, space)


def estimate_bytes(n: int, k: int) -> int:
    return 8 * (n + 1) + 4 * n * k


def build_schreier(space: VertexSpace, gens: GeneratorSet, *,
                   memory_budget: int | None = None, backend=None) -> SchreierGraph:
    """Schreier graph of ``gens`` acting on ``space``.

    Raises :class:`SizeOverflow` when the compressed adjacency would exceed
    ``memory_budget`` bytes or when indices do not fit in 32 bits.
    """
    kern = _kernels.get(backend)
    n, k = space.n, gens.k
    budget = DEFAULT_MEMORY_BUDGET if memory_budget is None else memory_budget
    need = estimate_bytes(n, k)
    if need > budget:
        raise SizeOverflow(f"graph needs {need} bytes, budget is {budget}")
    if n >= 2**31:
        raise SizeOverflow(f"{n} vertices do not fit 32-bit indices")

    if space.kind is SpaceKind.PERM:
        if not gens.is_permutation or gens.n != space.size:
            raise ConfigError("permutation space needs permutation generators of matching size")
        gens.check_symmetric(space)
        perms = np.ascontiguousarray(gens.permutations())
        fill = lambda lo, hi: kern.perm_neighbors(perms, lo, hi)  # noqa: E731
    else:
        if gens.is_permutation or gens.p != space.size:
            raise ConfigError("matrix generators must match the space modulus")
        gens.check_symmetric(space)
        mats = np.ascontiguousarray(gens.matrices()) if k else np.zeros((0, 4), np.int64)
        inv = kern.inverse_table(space.size)
        fill = lambda lo, hi: kern.schreier_neighbors(int(space.kind), space.size, mats, inv, lo, hi)  # noqa: E731

    neighbors = np.empty(n * k, dtype=np.int32)
    if k:
        for lo in range(0, n, _CHUNK):
            hi = min(n, lo + _CHUNK)
            neighbors[lo * k:hi * k] = fill(lo, hi).reshape(-1)
    offsets = np.arange(0, (n + 1) * k, k, dtype=np.int64) if k else np.zeros(n + 1, np.int64)
    return SchreierGraph(n, k, offsets, neighbors, space, gens)


def connected_components(graph: SchreierGraph) -> list[int]:
    """Component sizes, in order of each component's smallest vertex."""
    labels = graph.component_labels()
    return [int(c) for c in np.bincount(labels)] if labels.size else []


def is_bipartite(graph: SchreierGraph) -> list[bool]:
    """2-colourability of each component (same order as the sizes)."""
    return list(graph._components()[1])


def is_connected(graph: SchreierGraph) -> bool:
    return len(connected_components(graph)) == 1
