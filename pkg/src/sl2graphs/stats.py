"""Spectral statistics: the Kesten-McKay law, trivial-word counts,
discrepancy, level spacings and exceptional-eigenvalue counts.

The Kesten-McKay density of degree k (the spectral measure of the k-regular
tree) is

    f_k(x) = k sqrt(4(k-1) - x^2) / (2 pi (k^2 - x^2)),   |x| <= 2 sqrt(k-1).

Integrals against it substitute x = R sin(theta), R = 2 sqrt(k-1), which
turns the square-root endpoints into a smooth integrand for ``quad``.
"""

from __future__ import annotations

import csv
import math
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .errors import AlphaOutOfRange, ConfigError, EmptySample, GuardExceeded, TooFewEigenvalues

QUAD_ABS = 1e-12
MIN_SPACING_SAMPLE = 50
# (2d)^m must stay an exact double for the moment sums
GUARD_BITS = 53


def _check_degree(k):
    if k < 3:
        raise ConfigError("Kesten-McKay law needs k >= 3")


def km_radius(k: int) -> float:
    return 2.0 * math.sqrt(k - 1)


def ramanujan_bound(k: int) -> float:
    return 2.0 * math.sqrt(k - 1)


def km_density(k: int, x):
    _check_degree(k)
    x = np.asarray(x, dtype=np.float64)
    r2 = 4.0 * (k - 1)
    # compare |x| to the rounded radius so the endpoints give exactly zero
    inside = np.abs(x) < km_radius(k)
    root = np.sqrt(np.where(inside, r2 - x * x, 0.0))
    out = np.where(inside, k * root / (2 * np.pi * (k * k - x * x)), 0.0)
    return float(out) if out.ndim == 0 else out


def _theta_integrand(k):
    r = km_radius(k)

    def f(theta, m=0):
        s = math.sin(theta)
        c = math.cos(theta)
        return (r * s) ** m * k * r * r * c * c / (2 * math.pi * (k * k - r * r * s * s))
    return f


@lru_cache(maxsize=None)
def _km_cdf_scalar(k: int, x: float) -> float:
    r = km_radius(k)
    if x <= -r:
        return 0.0
    if x >= r:
        return 1.0
    f = _theta_integrand(k)
    top = math.asin(x / r)
    # integrate from the nearer endpoint for accuracy near the edges
    if top <= 0:
        val, _ = integrate.quad(f, -math.pi / 2, top, epsabs=QUAD_ABS, epsrel=1e-12, limit=200)
        return min(max(val, 0.0), 1.0)
    val, _ = integrate.quad(f, top, math.pi / 2, epsabs=QUAD_ABS, epsrel=1e-12, limit=200)
    return min(max(1.0 - val, 0.0), 1.0)


def km_cdf(k: int, x):
    """Kesten-McKay CDF by adaptive quadrature (scalar or array)."""
    _check_degree(k)
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        return _km_cdf_scalar(int(k), float(arr))
    return np.array([_km_cdf_scalar(int(k), float(v)) for v in arr.ravel()]).reshape(arr.shape)


def km_quantile(k: int, q):
    """Inverse CDF by bracketing root search."""
    from scipy.optimize import brentq
    r = km_radius(k)
    qs = np.atleast_1d(np.asarray(q, dtype=np.float64))
    out = np.empty_like(qs)
    for i, v in enumerate(qs):
        if v <= 0:
            out[i] = -r
        elif v >= 1:
            out[i] = r
        else:
            out[i] = brentq(lambda t: _km_cdf_scalar(int(k), t) - v, -r, r, xtol=1e-14, rtol=1e-15)
    return out if np.ndim(q) else float(out[0])


def km_moment(k: int, m: int) -> float:
    """m-th moment of the Kesten-McKay law, by quadrature."""
    _check_degree(k)
    if m < 0 or m > 40:
        raise ConfigError("moment order must lie in [0, 40]")
    if m % 2:
        return 0.0
    f = _theta_integrand(k)
    # scale the absolute tolerance with the size of the answer
    scale = (k - 1) ** (m / 2) * 4 ** (m / 2)
    val, _ = integrate.quad(f, -math.pi / 2, math.pi / 2, args=(m,),
                            epsabs=QUAD_ABS * max(1.0, scale), epsrel=1e-13, limit=400)
    return val


def trivial_word_count(d: int, m: int) -> int:
    """N(d, m): reduced words of length m in the free group on d letters that
    equal the identity, i.e. closed m-walks at the root of the 2d-regular tree.

    Dynamic program over the distance from the root; Python ints are exact.
    """
    if m < 0 or d < 1:
        raise ConfigError("need d >= 1 and m >= 0")
    k = 2 * d
    walks = [1] + [0] * m  # walks[r] = number of walks now at distance r
    for _ in range(m):
        nxt = [0] * (m + 1)
        nxt[1] += walks[0] * k
        for r in range(1, m + 1):
            w = walks[r]
            if w:
                nxt[r - 1] += w
                if r < m:
                    nxt[r + 1] += w * (k - 1)
        walks = nxt
    return walks[0]


def _values(sample) -> np.ndarray:
    ev = getattr(sample, "eigenvalues", sample)
    return np.sort(np.asarray(ev, dtype=np.float64).ravel())


def discrepancy(sample, k: int) -> float:
    """Sup over closed intervals I of |nu(I) - mu(I)|, nu the empirical
    measure of ``sample`` and mu the Kesten-McKay law of degree k.

    Both one-sided suprema are attained with endpoints at sample points (or
    just inside the gaps between them), so a prefix scan over the sorted
    values is exact.  Ties are grouped so an endpoint takes all copies.
    """
    x = _values(sample)
    n = x.size
    if n == 0:
        raise EmptySample("discrepancy of an empty sample")
    vals, first, counts = np.unique(x, return_index=True, return_counts=True)
    last = first + counts  # one past the last copy
    F = km_cdf(k, vals)
    # nu - mu: I = [v_i, v_j], i <= j, holds atoms first[i] .. last[j]-1
    left = F - first / n
    right = last / n - F
    d_plus = float(np.max(right + np.maximum.accumulate(left)))
    # mu - nu: I inside (v_i, v_j), i < j, with sentinels at -inf and +inf
    Fs = np.concatenate(([0.0], F, [1.0]))
    lo_cnt = np.concatenate(([0], last, [n])) / n
    hi_cnt = np.concatenate(([0], first, [n])) / n
    a = Fs - lo_cnt  # as the left end (atom excluded)
    b = Fs - hi_cnt  # as the right end (atom excluded)
    best_a = np.minimum.accumulate(a)[:-1]
    d_minus = float(np.max(b[1:] - best_a))
    return min(max(d_plus, d_minus, 0.0), 1.0)


def unfold_spacings(sample, k: int) -> np.ndarray:
    """Consecutive spacings after mapping eigenvalues through the
    Kesten-McKay CDF, renormalized to mean 1.  Values outside the support
    contribute no spacing."""
    x = _values(sample)
    if x.size < MIN_SPACING_SAMPLE:
        raise TooFewEigenvalues(f"need at least {MIN_SPACING_SAMPLE} eigenvalues, got {x.size}")
    r = km_radius(k)
    inside = x[np.abs(x) <= r]
    if inside.size < 2:
        raise TooFewEigenvalues("fewer than two eigenvalues inside the support")
    u = km_cdf(k, inside) * x.size
    s = np.diff(u)
    mean = s.mean()
    if mean <= 0:
        raise TooFewEigenvalues("all eigenvalues coincide")
    return s / mean


def goe_cdf(s):
    s = np.asarray(s, dtype=np.float64)
    return np.where(s > 0, 1 - np.exp(-np.pi * s * s / 4), 0.0)


def gse_cdf(s):
    # density (2^18 / (3^6 pi^3)) s^4 exp(-64 s^2 / (9 pi)) integrates to P(5/2, .)
    s = np.asarray(s, dtype=np.float64)
    return np.where(s > 0, special.gammainc(2.5, 64 * s * s / (9 * np.pi)), 0.0)


def gse_density(s):
    s = np.asarray(s, dtype=np.float64)
    return 2**18 / (3**6 * np.pi**3) * s**4 * np.exp(-64 * s * s / (9 * np.pi))


def goe_density(s):
    s = np.asarray(s, dtype=np.float64)
    return np.pi * s / 2 * np.exp(-np.pi * s * s / 4)


def poisson_cdf(s):
    s = np.asarray(s, dtype=np.float64)
    return np.where(s > 0, 1 - np.exp(-s), 0.0)


MODELS = {"goe": goe_cdf, "gse": gse_cdf, "poisson": poisson_cdf}


def spacing_ks(spacings, model: str) -> float:
    """Kolmogorov-Smirnov distance between the empirical spacing CDF and a
    Wigner surmise (GOE, GSE) or the Poisson law."""
    try:
        cdf = MODELS[model.lower()]
    except KeyError:
        raise ConfigError(f"unknown spacing model {model!r}") from None
    s = np.sort(np.asarray(spacings, dtype=np.float64))
    n = s.size
    if n == 0:
        raise EmptySample("no spacings")
    F = cdf(s)
    i = np.arange(n)
    return float(min(1.0, max(np.max((i + 1) / n - F), np.max(F - i / n))))


def exceptional_bound(p: int, k: int, alpha: float) -> float:
    """p^(1 - log_k(alpha)/2), the density bound without its o(1) term."""
    return float(p) ** (1 - math.log(alpha, k) / 2)


def count_exceptional(sample, k: int, alpha: float, p: int | None = None):
    """Number of |lambda| > alpha * 2 sqrt(k-1), with the density bound.

    Trivial eigenvalues must already be removed.  Returns ``(count, bound)``;
    the bound is None when p is unknown.
    """
    if not alpha > 1:
        raise AlphaOutOfRange(f"alpha must exceed 1, got {alpha}")
    x = _values(sample)
    count = int(np.count_nonzero(np.abs(x) > alpha * ramanujan_bound(k)))
    if p is None:
        p = getattr(sample, "p", None)
    bound = exceptional_bound(p, k, alpha) if p else None
    return count, bound


def moment_of_sample(sample, m: int) -> float:
    x = _values(sample)
    if x.size == 0:
        raise EmptySample("moment of an empty sample")
    return float(np.mean(x**m))


def sl_order(p: int, n: int = 2) -> int:
    out = p ** (n * (n - 1) // 2)
    for i in range(2, n + 1):
        out *= p**i - 1
    return out


def variance_bound(p: int, d: int, m: int, n: int = 2, dim: float | None = None) -> float:
    """2 (2d)^(2m) |G| / (c(G) dim^2) with c(G) a lower bound on nontrivial
    conjugacy-class sizes.

    For SL2, c = p^2 (as in the moment argument) and dim defaults to the
    Steinberg degree p.  For SLn the class bound of regular elements
    p^(n^2 - n) is used with dim defaulting to p^(n-1).
    """
    if n < 2:
        raise ConfigError("need n >= 2")
    dim = float(p if n == 2 else p ** (n - 1)) if dim is None else float(dim)
    cls = float(p) ** (n * n - n)
    return 2.0 * float(2 * d) ** (2 * m) * sl_order(p, n) / (cls * dim * dim)


def _check_guard(d, m):
    if m * math.log(2 * d) > GUARD_BITS * math.log(2):
        raise GuardExceeded(f"(2d)^m = {2 * d}^{m} is beyond exact double range")


def steinberg_moment(adjacency_spectrum, k: int, m: int, p: int) -> float:
    """(trace A^m - k^m) / p: the m-th moment of the Steinberg sector of a
    projective graph, from its full spectrum."""
    ev = np.asarray(adjacency_spectrum, dtype=np.float64)
    return float((np.sum(ev**m) - float(k) ** m) / p)


def moment_variance_mc(p: int, d: int, m: int, trials: int = 50, seed: int = 0):
    """Empirical variance of the Steinberg m-th moment around N(d, m) over
    random symmetric sets, and the theoretical bound.

    Returns ``(variance, bound, moments)``.
    """
    from .graph import build_schreier
    from .groups import VertexSpace, random_symmetric_generators
    from .spectra import graph_spectrum

    if trials < 10:
        raise ConfigError("need at least 10 trials")
    _check_guard(d, m)
    target = trivial_word_count(d, m)
    space = VertexSpace.projective(p)
    moments = []
    for t in range(trials):
        gens = random_symmetric_generators(seed, d, p, trial=t)
        ev = graph_spectrum(build_schreier(space, gens))
        moments.append(steinberg_moment(ev, 2 * d, m, p))
    moments = np.array(moments)
    var = float(np.mean((moments - target) ** 2))
    return var, variance_bound(p, d, m), moments


def histogram(values, bins=40, value_range=None, density=None):
    """Counts and, when ``density`` is given, the model density at bin centres."""
    counts, edges = np.histogram(np.asarray(values, dtype=np.float64), bins=bins, range=value_range)
    centres = (edges[:-1] + edges[1:]) / 2
    model = density(centres) if density is not None else np.full(centres.shape, np.nan)
    return edges, counts, model


def write_histogram_csv(path, values, bins=40, value_range=None, density=None) -> None:
    edges, counts, model = histogram(values, bins, value_range, density)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_left", "bin_right", "count", "model_density"])
        for i in range(counts.size):
            w.writerow([repr(float(edges[i])), repr(float(edges[i + 1])), int(counts[i]),
                        repr(float(model[i]))])
