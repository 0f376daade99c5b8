"""Sector (monochromatic) decomposition of Schreier spectra.

The scalars a in GF(p)^* act on the punctured affine plane by v -> a*v and
commute with every matrix, so functions on A^2 \\ {0} split by the character
chi_j(a^t) = zeta^(j t) of the cyclic group GF(p)^*, zeta = exp(2 pi i/(p-1)).
Each character piece is a (p+1)-dimensional space indexed by the projective
line: pick representatives v_P = (x, 1) for P = x and v_inf = (1, 0), write
g.v_P = a^t v_P' and put zeta^(j t) at entry (P', P) of block j.  Block 0 is
the projective adjacency; for 0 < j < p-1 the block is a principal-series
sector.  The union of all block spectra is the affine-graph spectrum.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, MissingTrivialEigenvalue, NotHermitian, SizeOverflow
from .groups import GeneratorSet, VertexSpace
from .modp import DlogTable
from .spectra import dense_eigenvalues

DENSE_LIMIT = 20011
TRIVIAL_TOL = 1e-6

WHOLE = "WholeGraph"
TRIVIAL = "Trivial"
STEINBERG = "Steinberg"


def principal_series(j: int) -> str:
    return f"PrincipalSeries({int(j)})"


@dataclass
class SpectrumSample:
    """Sorted eigenvalues of one sector (or of a whole graph)."""

    eigenvalues: np.ndarray
    sector: str
    k: int
    p: int | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        ev = np.sort(np.asarray(self.eigenvalues, dtype=np.float64))
        if ev.size and np.max(np.abs(ev)) > self.k + 1e-9:
            raise ConfigError("eigenvalue exceeds the degree")
        self.eigenvalues = ev

    def __len__(self):
        return int(self.eigenvalues.size)

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "sector": self.sector,
                "provenance": self.provenance,
                "eigenvalues": [float(x) for x in self.eigenvalues]}

    def dumps(self) -> str:
        # json writes floats with repr, which round-trips doubles exactly
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, obj) -> "SpectrumSample":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(np.array(obj["eigenvalues"], dtype=np.float64), obj["sector"],
                   int(obj["k"]), obj.get("p"), dict(obj.get("provenance") or {}))


@dataclass(frozen=True, eq=False)
class TorusStructure:
    """Shared (row, col, exponent) triples; block j only changes the phases."""

    p: int
    k: int
    rows: np.ndarray  # P' index, length (p+1)*k
    cols: np.ndarray  # P index
    expo: np.ndarray  # t with g.v_P = a^t v_P'
    generators: GeneratorSet | None = None

    @property
    def size(self) -> int:
        return self.p + 1

    def phases(self, j: int) -> np.ndarray:
        t = (int(j) * self.expo) % (self.p - 1)
        return np.exp(2j * np.pi * t / (self.p - 1))

    def sparse_block(self, j: int) -> sp.csr_matrix:
        m = sp.coo_matrix((self.phases(j), (self.rows, self.cols)),
                          shape=(self.size, self.size)).tocsr()
        m.sum_duplicates()
        return m

    def dense_block(self, j: int) -> np.ndarray:
        out = np.zeros((self.size, self.size), dtype=np.complex128)
        np.add.at(out, (self.rows, self.cols), self.phases(j))
        return out

    def block(self, j: int) -> "SectorBlock":
        return SectorBlock(int(j), self.dense_block(j), self.p, self.generators)


@dataclass(eq=False)
class SectorBlock:
    j: int
    matrix: np.ndarray
    p: int
    generators: GeneratorSet | None = None

    def eigenvalues(self) -> np.ndarray:
        m = self.matrix.real if self.j == 0 else self.matrix
        return dense_eigenvalues(m)


def torus_structure(p: int, gens: GeneratorSet, *, dense_limit: int = DENSE_LIMIT) -> TorusStructure:
    """Index/exponent triples for all sector blocks of ``gens`` at ``p``."""
    if p > dense_limit:
        raise SizeOverflow(f"p={p} exceeds the sector limit {dense_limit}")
    if gens.is_permutation or gens.p != p:
        raise ConfigError("generator set does not match the modulus")
    gens.check_symmetric(VertexSpace.affine(p))
    dlog = DlogTable.build(p)
    # representatives: column P < p is (P, 1), column p is (1, 0)
    x = np.concatenate((np.arange(p, dtype=np.int64), [1]))
    y = np.concatenate((np.ones(p, dtype=np.int64), [0]))
    cols = np.arange(p + 1, dtype=np.int64)
    inv = np.zeros(p, dtype=np.int64)
    inv[dlog.powers] = dlog.powers[(-np.arange(p - 1)) % (p - 1)]
    rows, cs, expo = [], [], []
    for ga, gb, gc, gd in gens.matrices():
        u = (ga * x + gb * y) % p
        w = (gc * x + gd * y) % p
        finite = w != 0
        scale = np.where(finite, w, u)
        row = np.where(finite, u * inv[np.where(finite, w, 1)] % p, p)
        rows.append(row)
        cs.append(cols)
        expo.append(dlog.table[scale])
    return TorusStructure(p, gens.k, np.concatenate(rows), np.concatenate(cs),
                          np.concatenate(expo), gens)


def torus_sector_blocks(p: int, gens: GeneratorSet, *, dense_limit: int = DENSE_LIMIT) -> list[SectorBlock]:
    """All p-1 character blocks, j = 0 .. p-2, as dense Hermitian matrices."""
    st = torus_structure(p, gens, dense_limit=dense_limit)
    return [st.block(j) for j in range(p - 1)]


def steinberg_spectrum(projective_spectrum, k: int, bipartite: bool = False, *,
                       p: int | None = None, provenance: dict | None = None) -> SpectrumSample:
    """Drop the trivial eigenvalue k (and -k for a bipartite graph)."""
    ev = np.sort(np.asarray(projective_spectrum, dtype=np.float64))
    top = np.flatnonzero(np.abs(ev - k) <= TRIVIAL_TOL)
    if top.size == 0:
        raise MissingTrivialEigenvalue(f"no eigenvalue within {TRIVIAL_TOL} of {k}")
    if top.size > 1:
        raise MissingTrivialEigenvalue("eigenvalue k is repeated; the graph is disconnected")
    ev = np.delete(ev, top[-1])
    if bipartite:
        low = np.flatnonzero(np.abs(ev + k) <= TRIVIAL_TOL)
        if low.size == 0:
            raise MissingTrivialEigenvalue(f"bipartite graph without eigenvalue {-k}")
        ev = np.delete(ev, low[0])
    return SpectrumSample(ev, STEINBERG, k, p, dict(provenance or {}))


def monochromatic_spectrum(p: int, gens: GeneratorSet, j: int, *,
                           structure: TorusStructure | None = None,
                           dense_limit: int = DENSE_LIMIT) -> SpectrumSample:
    """Eigenvalues of principal-series block ``j`` (0 < j < p-1)."""
    if not 0 < j < p - 1:
        raise ConfigError(f"character index must satisfy 0 < j < {p - 1}")
    st = structure or torus_structure(p, gens, dense_limit=dense_limit)
    block = st.dense_block(j)
    try:
        ev = dense_eigenvalues(block, limit=dense_limit + 1)
    except NotHermitian as exc:  # pragma: no cover - guarded by the symmetry check
        raise NotHermitian(f"block {j}: {exc}") from exc
    prov = {"family": gens.kind, "seed": gens.seed, "j": int(j)}
    return SpectrumSample(ev, principal_series(j), gens.k, p, prov)


def irreducible_characters(p: int) -> list[int]:
    """Character indices used for monochromatic statistics: j = 0 and the
    quadratic character j = (p-1)/2 are left out (both sectors reducible)."""
    half = (p - 1) // 2
    return [j for j in range(1, p - 1) if j != half]


def affine_spectrum_by_sectors(p: int, gens: GeneratorSet) -> np.ndarray:
    """Sorted union of all block spectra (equals the affine spectrum)."""
    st = torus_structure(p, gens)
    parts = [dense_eigenvalues(st.dense_block(0).real)]
    for j in range(1, p - 1):
        parts.append(dense_eigenvalues(st.dense_block(j)))
    return np.sort(np.concatenate(parts))


def affine_extreme(p: int, gens: GeneratorSet, *, tol: float = 1e-8, dense_below: int = 600):
    """Largest and smallest nontrivial affine eigenvalues, sector by sector.

    Blocks j and p-1-j are complex conjugates, so only j <= (p-1)/2 is solved.
    Block 0 has the trivial eigenvalue k removed (and -k if present, which
    happens exactly when the projective graph is bipartite).
    """
    import scipy.sparse.linalg as spla

    st = torus_structure(p, gens)
    k = gens.k
    hi, lo = -np.inf, np.inf
    for j in range(0, (p - 1) // 2 + 1):
        if st.size <= dense_below:
            ev = dense_eigenvalues(st.dense_block(j).real if j == 0 else st.dense_block(j))
        else:
            m = st.sparse_block(j)
            if j == 0:
                m = m.real
            a = spla.eigsh(m, k=3, which="LA", tol=tol, return_eigenvectors=False)
            b = spla.eigsh(m, k=3, which="SA", tol=tol, return_eigenvectors=False)
            ev = np.sort(np.concatenate((a, b)))
        if j == 0:
            ev = np.sort(ev)
            if abs(ev[-1] - k) <= TRIVIAL_TOL:
                ev = ev[:-1]
            if abs(ev[0] + k) <= TRIVIAL_TOL:
                ev = ev[1:]
        hi, lo = max(hi, float(ev.max())), min(lo, float(ev.min()))
    return hi, lo


def kramers_reduce(sample: SpectrumSample, tol: float = 1e-8) -> SpectrumSample:
    """Keep one eigenvalue from each degenerate pair.

    Sectors with an odd character index carry a quaternionic structure (the
    central element -1 acts by -1 on a self-dual representation), so every
    eigenvalue of the block appears twice.  Spacing statistics must count
    each such pair once.  Samples that are not paired are returned as is.
    """
    ev = sample.eigenvalues
    if ev.size % 2 or ev.size == 0 or np.max(np.abs(ev[0::2] - ev[1::2])) > tol:
        return sample
    prov = dict(sample.provenance, kramers_pairs=True)
    return SpectrumSample((ev[0::2] + ev[1::2]) / 2, sample.sector, sample.k, sample.p, prov)
