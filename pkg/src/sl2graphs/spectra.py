"""Eigenvalue computations.

Dense spectra go through LAPACK (``numpy.linalg.eigvalsh``).  Extreme
nontrivial eigenvalues of large regular graphs use implicitly restarted
Lanczos (ARPACK via ``scipy.sparse.linalg.eigsh``) on the adjacency operator
restricted to the orthogonal complement of the constant vector (and of the
colour-sign vector when the graph is bipartite).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from . import rng
from .errors import ConfigError, NoConvergence, NotConnected, NotHermitian
from .graph import SchreierGraph, connected_components, is_bipartite

DENSE_LIMIT = 25000
# below this many vertices extreme_nontrivial solves densely
SMALL_GRAPH = 400


@dataclass(frozen=True)
class EigenRequest:
    mode: str = "extreme"  # "full" or "extreme"
    tolerance: float = 1e-8
    max_iterations: int = 20000
    seed: int = 0

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")
        if self.mode not in ("full", "extreme"):
            raise ConfigError(f"unknown eigen mode {self.mode!r}")


@dataclass
class ExtremeResult:
    lambda2: float
    lambda_min: float
    top: float  # max(|lambda2|, |lambda_min|)
    bipartite: bool
    method: str
    residuals: dict = field(default_factory=dict)


def hermitian_residual(matrix) -> float:
    m = np.asarray(matrix)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def dense_eigenvalues(matrix, *, limit: int = DENSE_LIMIT, check: bool = True) -> np.ndarray:
    """All eigenvalues of a real-symmetric or Hermitian matrix, ascending."""
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotHermitian("matrix must be square")
    if m.shape[0] > limit:
        raise ConfigError(f"dimension {m.shape[0]} exceeds dense limit {limit}")
    if check and hermitian_residual(m) >= 1e-10:
        raise NotHermitian(f"Hermiticity residual {hermitian_residual(m):.3e}")
    try:
        return np.linalg.eigvalsh(m)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc


def graph_spectrum(graph: SchreierGraph) -> np.ndarray:
    return dense_eigenvalues(graph.dense(), check=False)


def _coloring_sign(graph: SchreierGraph) -> np.ndarray:
    """+1/-1 by BFS colour of a connected bipartite graph."""
    from .metrics import bfs
    dist = bfs(graph, 0).dist
    return np.where(dist % 2 == 0, 1.0, -1.0)


def extreme_nontrivial(graph: SchreierGraph, request: EigenRequest | None = None, *,
                       lower: bool = True) -> ExtremeResult:
    """Largest and smallest eigenvalue off the trivial eigenvectors.

    The trivial eigenvalue k (constant vector) is always removed, and -k
    (colour-sign vector) when the graph is bipartite.  Two Ritz pairs are
    converged at each end so close top eigenvalues are resolved together.
    With ``lower=False`` only lambda_2 is computed (lambda_min is NaN).
    """
    request = request or EigenRequest()
    if not graph.is_regular:
        raise ConfigError("extreme_nontrivial needs a regular graph")
    if len(connected_components(graph)) != 1:
        raise NotConnected("graph is not connected")
    k = graph.k
    bip = is_bipartite(graph)[0]
    n = graph.n
    if n <= SMALL_GRAPH:
        ev = graph_spectrum(graph)
        ev = np.delete(ev, np.argmax(ev))
        if bip:
            ev = np.delete(ev, np.argmin(ev))
        return ExtremeResult(float(ev[-1]), float(ev[0]),
                             float(max(abs(ev[-1]), abs(ev[0]))), bip, "dense")

    adj = graph.adjacency()
    sign = _coloring_sign(graph) / np.sqrt(n) if bip else None

    def project(x):
        x = x - x.mean()
        if sign is not None:
            x = x - (sign @ x) * sign
        return x

    op = spla.LinearOperator((n, n), matvec=lambda x: project(adj @ project(x.ravel())),
                             dtype=np.float64)
    gen = rng.stream(request.seed, n, 0)
    v0 = project(gen.standard_normal(n))
    out = {}
    residuals = {}
    for which in ("LA", "SA") if lower else ("LA",):
        try:
            vals, vecs = spla.eigsh(op, k=2, which=which, v0=v0, tol=request.tolerance,
                                    maxiter=request.max_iterations, ncv=min(n - 1, 64))
        except spla.ArpackNoConvergence as exc:
            raise NoConvergence(f"Lanczos did not converge ({which})",
                                iterations=request.max_iterations) from exc
        i = int(np.argmax(vals)) if which == "LA" else int(np.argmin(vals))
        lam, vec = float(vals[i]), vecs[:, i]
        res = float(np.linalg.norm(adj @ vec - lam * vec) / np.linalg.norm(vec))
        if res > request.tolerance * k:
            raise NoConvergence(f"residual {res:.2e} above tolerance ({which})",
                                iterations=request.max_iterations)
        out[which] = lam
        residuals[which] = res
    lam2, lmin = out["LA"], out.get("SA", float("nan"))
    top = max(abs(lam2), abs(lmin)) if lower else abs(lam2)
    return ExtremeResult(lam2, lmin, top, bip, "lanczos", residuals)
