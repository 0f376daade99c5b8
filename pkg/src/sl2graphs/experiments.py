"""Config-driven experiment runner.

A config (JSON) names a generator family, a vertex space, a prime grid, seeds
and a list of measurements.  ``run`` walks the (p, seed) grid, builds each
graph, performs the measurements and appends one JSON line per unit to the
output file.  Units already present in the file (same config digest, p and
seed) are skipped, so an interrupted sweep resumes where it stopped.

Record schema (version 1), one JSON object per line:

    schema          1
    config_digest   sha256 of the canonical config (output/threads excluded)
    config          the canonical config itself, so a record can be re-run
    p, seed         the unit
    family, space   as in the config
    generators      GeneratorSet.to_json() (matrices, inverse pairing, seed)
    connected       bool; when false, spectral and distance results are null
    bipartite       bool or null
    results         measurement name -> value (see MEASUREMENTS)
    errors          measurement name -> {"type", "message"} for failed ones
    runtimes        measurement name -> seconds
    version         package version
    wall_time       seconds for the whole unit

Floats are written with ``repr`` precision, so records round-trip exactly.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .desymmetrize import (
    WHOLE,
    SpectrumSample,
    affine_extreme,
    affine_spectrum_by_sectors,
    kramers_reduce,
    monochromatic_spectrum,
    steinberg_spectrum,
)
from .errors import BadPrimeResidue, ConfigError, EmptyInput, Sl2GraphsError
from .graph import build_schreier, is_bipartite, is_connected
from .groups import SpaceKind, VertexSpace, make_generators
from .metrics import diameter, essential_diameter, girth_at_identity, radius_at
from .modp import is_prime
from .primes import nth_range, sieve
from .spectra import EigenRequest, extreme_nontrivial, graph_spectrum
from .stats import count_exceptional, discrepancy, ramanujan_bound, spacing_ks, unfold_spacings

SCHEMA_VERSION = 1

MEASUREMENTS = {
    "top_eig": "lambda2, lambda_min, top and lambda2_minus_bound",
    "spectrum": "sorted sector eigenvalues",
    "discrepancy": "Kesten-McKay discrepancy of the sector sample",
    "spacings": "KS distances of unfolded spacings to GOE, GSE, Poisson",
    "exceptional": "count of |lambda| > alpha * 2 sqrt(k-1) and the density bound",
    "diameter": "exact diameter",
    "radius_at": "eccentricity of a vertex",
    "essential_diameter": "smallest h with a q-fraction of distances below h",
    "girth": "shortest relators at the identity",
}
_DEFAULT_ARG = {"exceptional": 1.05, "radius_at": 0, "essential_diameter": 0.99}
_FIELDS = {"family", "space", "primes", "seeds", "measurements", "tolerances",
           "output", "d", "character", "threads", "memory_budget"}
_NTH = re.compile(r"^\s*nth-range\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")
_CALL = re.compile(r"^\s*([a-z_]+)\s*(?:\(\s*([^)]*)\s*\))?\s*$")


def parse_measurement(item):
    """'exceptional(1.05)', {'exceptional': 1.05} or 'diameter' -> (name, arg)."""
    if isinstance(item, dict):
        if len(item) != 1:
            raise ConfigError(f"bad measurement {item!r}")
        (name, arg), = item.items()
    elif isinstance(item, (list, tuple)) and len(item) == 2:
        name, arg = item
    else:
        m = _CALL.match(str(item))
        if not m:
            raise ConfigError(f"bad measurement {item!r}")
        name, arg = m.group(1), m.group(2)
        if arg is not None:
            arg = float(arg) if name != "radius_at" else int(arg)
    if name not in MEASUREMENTS:
        raise ConfigError(f"unknown measurement {name!r}")
    if arg is None:
        arg = _DEFAULT_ARG.get(name)
    return name, arg


def resolve_primes(grid) -> list[int]:
    if isinstance(grid, str):
        m = _NTH.match(grid)
        if not m:
            raise ConfigError(f"bad prime grid {grid!r}")
        return nth_range(int(m.group(1)), int(m.group(2)))
    if isinstance(grid, dict):
        if set(grid) == {"nth_range"}:
            a, b = grid["nth_range"]
            return nth_range(int(a), int(b))
        if set(grid) == {"range", "count"}:
            lo, hi = grid["range"]
            ps = [int(p) for p in sieve(int(hi)) if p >= int(lo)]
            return ps[:int(grid["count"])]
        raise ConfigError(f"bad prime grid {grid!r}")
    return [int(p) for p in grid]


@dataclass
class ExperimentConfig:
    family: str
    space: str
    primes: list
    measurements: list
    seeds: list = field(default_factory=lambda: [0])
    tolerances: dict = field(default_factory=dict)
    output: str | None = None
    d: int = 2
    character: int = 1
    threads: int = 1
    memory_budget: int | None = None

    def __post_init__(self):
        self.family = str(self.family).lower()
        if self.family in ("fixeds", "s"):
            self.family = "fixed"
        if self.family not in ("fixed", "lps", "random", "perm"):
            raise ConfigError(f"unknown family {self.family!r}")
        self.space = SpaceKind.parse(self.space).name.lower()
        self.primes = resolve_primes(self.primes)
        if not self.primes:
            raise ConfigError("empty prime list")
        if self.space != "perm":
            for p in self.primes:
                if p < 3 or not is_prime(p):
                    raise ConfigError(f"{p} is not an odd prime")
        if self.family == "lps":
            bad = [p for p in self.primes if p % 12 != 1]
            if bad:
                raise BadPrimeResidue(f"LPS generators need p = 1 mod 12; got {bad[:5]}")
            if self.space != "projective":
                raise ConfigError("LPS generators are symmetric only on the projective line")
        if not self.measurements:
            raise ConfigError("measurement set is empty")
        self.measurements = [list(parse_measurement(m)) for m in self.measurements]
        self.seeds = [int(s) for s in self.seeds]
        if not self.seeds:
            raise ConfigError("seed list is empty")
        self.tolerances = {"eig": 1e-8, **dict(self.tolerances)}
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentConfig":
        unknown = set(obj) - _FIELDS
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        try:
            return cls(**obj)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(obj)

    def canonical(self) -> dict:
        out = asdict(self)
        out.pop("output")
        out.pop("threads")
        return out

    @property
    def digest(self) -> str:
        text = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    def units(self) -> list[tuple[int, int]]:
        return [(p, s) for p in self.primes for s in self.seeds]


# --- one unit -------------------------------------------------------------

_SPECTRAL = {"top_eig", "spectrum", "discrepancy", "spacings", "exceptional"}
_DISTANCE = {"diameter", "radius_at", "essential_diameter"}


def _sector_sample(cfg, p, gens, graph, bip, cache) -> SpectrumSample:
    """The nontrivial sector studied for spectral statistics."""
    if "sample" in cache:
        return cache["sample"]
    k = gens.k
    if cfg.space == "projective":
        sample = steinberg_spectrum(graph_spectrum(graph), k, bip, p=p,
                                    provenance={"family": gens.kind, "seed": gens.seed})
    elif cfg.space == "affine":
        sample = monochromatic_spectrum(p, gens, cfg.character)
    else:
        ev = np.sort(graph_spectrum(graph))[:-1]
        if bip:
            ev = ev[1:]
        sample = SpectrumSample(ev, WHOLE, k, p, {"family": gens.kind, "seed": gens.seed})
    cache["sample"] = sample
    return sample


def _measure(name, arg, cfg, p, seed, gens, graph, bip, cache):
    k = gens.k
    bound = ramanujan_bound(k)
    if name == "top_eig":
        if cfg.space == "affine":
            hi, lo = affine_extreme(p, gens, tol=cfg.tolerances["eig"])
            return {"lambda2": hi, "lambda_min": lo, "top": max(abs(hi), abs(lo)),
                    "lambda2_minus_bound": hi - bound, "method": "sectors"}
        r = extreme_nontrivial(graph, EigenRequest(tolerance=cfg.tolerances["eig"], seed=seed))
        return {"lambda2": r.lambda2, "lambda_min": r.lambda_min, "top": r.top,
                "lambda2_minus_bound": r.lambda2 - bound, "method": r.method}
    if name == "spectrum":
        if cfg.space == "affine":
            return {"sector": WHOLE, "eigenvalues": affine_spectrum_by_sectors(p, gens).tolist()}
        s = _sector_sample(cfg, p, gens, graph, bip, cache)
        return {"sector": s.sector, "eigenvalues": s.eigenvalues.tolist()}
    if name == "discrepancy":
        s = _sector_sample(cfg, p, gens, graph, bip, cache)
        return {"sector": s.sector, "value": discrepancy(s, k)}
    if name == "spacings":
        s = kramers_reduce(_sector_sample(cfg, p, gens, graph, bip, cache))
        sp = unfold_spacings(s, k)
        return {"sector": s.sector, "count": int(sp.size),
                "kramers_pairs": bool(s.provenance.get("kramers_pairs", False)),
                **{m: spacing_ks(sp, m) for m in ("goe", "gse", "poisson")}}
    if name == "exceptional":
        s = _sector_sample(cfg, p, gens, graph, bip, cache)
        count, b = count_exceptional(s, k, arg, p=p)
        return {"alpha": arg, "count": count, "bound": b, "size": len(s)}
    if name == "diameter":
        return diameter(graph, transitive_hint=cfg.space == "group")
    if name == "radius_at":
        return {"vertex": arg, "radius": radius_at(graph, arg)}
    if name == "essential_diameter":
        return {"q": arg, "value": essential_diameter(graph, arg, seed=seed)}
    if name == "girth":
        return asdict(girth_at_identity(gens))
    raise ConfigError(f"unknown measurement {name!r}")  # pragma: no cover


def run_unit(cfg: ExperimentConfig, p: int, seed: int) -> dict:
    """Build and measure one (p, seed) unit; never raises library errors."""
    t0 = time.perf_counter()
    rec = {"schema": SCHEMA_VERSION, "config_digest": cfg.digest, "config": cfg.canonical(),
           "p": p, "seed": seed, "family": cfg.family, "space": cfg.space,
           "generators": None, "connected": None, "bipartite": None,
           "results": {}, "errors": {}, "runtimes": {}, "version": __version__}
    try:
        gens = make_generators(cfg.family, p, seed=seed, d=cfg.d)
        rec["generators"] = gens.to_json()
        space = VertexSpace(SpaceKind.parse(cfg.space), p)
        names = {m[0] for m in cfg.measurements}
        graph = bip = None
        needs_graph = cfg.space != "affine" or bool(names & _DISTANCE)
        if needs_graph and (names - {"girth"}):
            graph = build_schreier(space, gens, memory_budget=cfg.memory_budget)
            rec["connected"] = is_connected(graph)
            rec["bipartite"] = bool(is_bipartite(graph)[0]) if rec["connected"] else None
        elif cfg.space == "affine":
            hi, _ = affine_extreme(p, gens, tol=cfg.tolerances["eig"])
            rec["connected"] = bool(hi < gens.k - 1e-6)
    except Sl2GraphsError as exc:
        rec["errors"]["setup"] = {"type": type(exc).__name__, "message": str(exc)}
        rec["wall_time"] = time.perf_counter() - t0
        return rec
    cache = {}
    for name, arg in cfg.measurements:
        key = name if arg is None or name == "top_eig" else f"{name}({arg})"
        if rec["connected"] is False and name != "girth":
            rec["results"][key] = None
            continue
        t = time.perf_counter()
        try:
            rec["results"][key] = _measure(name, arg, cfg, p, seed, gens, graph, rec["bipartite"], cache)
        except Sl2GraphsError as exc:
            rec["results"][key] = None
            rec["errors"][key] = {"type": type(exc).__name__, "message": str(exc)}
        rec["runtimes"][key] = time.perf_counter() - t
    rec["wall_time"] = time.perf_counter() - t0
    return rec


# --- sweeps ---------------------------------------------------------------

def dumps_record(rec: dict) -> str:
    return json.dumps(rec, sort_keys=True, allow_nan=True)


def read_records(path) -> list[dict]:
    if not path or not os.path.exists(path):
        return []
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                try:
                    out.append(json.loads(line))
                except json.JSONDecodeError:
                    # a torn final line from an interrupted write
                    continue
    return out


def _run_star(args):
    return run_unit(*args)


def run(cfg: ExperimentConfig, output: str | None = None, threads: int | None = None):
    """Yield records for the config's units that are not yet in the output.

    Records are appended to ``output`` (or ``cfg.output``) one line at a
    time, in unit order, by this process only.
    """
    output = output or cfg.output
    threads = threads or cfg.threads
    done = {(r.get("config_digest"), r.get("p"), r.get("seed")) for r in read_records(output)}
    todo = [(p, s) for p, s in cfg.units() if (cfg.digest, p, s) not in done]
    if output:
        os.makedirs(os.path.dirname(os.path.abspath(output)), exist_ok=True)

    def emit(rec):
        if output:
            with open(output, "a") as fh:
                fh.write(dumps_record(rec) + "\n")
        return rec

    if threads == 1 or len(todo) <= 1:
        for p, s in todo:
            yield emit(run_unit(cfg, p, s))
        return
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for rec in pool.map(_run_star, [(cfg, p, s) for p, s in todo]):
            yield emit(rec)


# --- summaries --------------------------------------------------------------

def _value(rec, measurement):
    res = rec.get("results") or {}
    for key, val in res.items():
        if key == measurement or key.startswith(measurement + "("):
            if val is None:
                return None
            if measurement == "top_eig":
                return val["lambda2_minus_bound"]
            if isinstance(val, dict):
                for f in ("value", "radius", "count"):
                    if f in val:
                        return val[f]
                return None
            return val
    return None


def summarize(records, measurement: str = "top_eig", bins: int = 20) -> dict:
    """Population mean/variance, histogram and Ramanujan violations."""
    vals = [v for v in (_value(r, measurement) for r in records) if v is not None]
    if not vals:
        raise EmptyInput(f"no values for {measurement!r}")
    x = np.asarray(vals, dtype=np.float64)
    counts, edges = np.histogram(x, bins=bins)
    out = {"measurement": measurement, "count": int(x.size), "mean": float(x.mean()),
           "variance": float(x.var()), "min": float(x.min()), "max": float(x.max()),
           "histogram": {"edges": edges.tolist(), "counts": counts.tolist()}}
    if measurement == "top_eig":
        out["violations"] = int(np.count_nonzero(x > 0))
        out["ramanujan"] = int(x.size - out["violations"])
    else:
        values, freq = np.unique(x, return_counts=True)
        out["mode"] = float(values[np.argmax(freq)])
    return out


def prime_index(p: int) -> int:
    """1-based position of p among the primes."""
    return int(np.searchsorted(sieve(int(p)), int(p)) + 1)


def write_figure_csv(records, path) -> int:
    """Plot data: prime_index, p, lambda2_minus_bound (one row per record)."""
    import csv
    rows = [(r["p"], _value(r, "top_eig")) for r in records]
    rows = sorted((p, v) for p, v in rows if v is not None)
    cache = {}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["prime_index", "p", "lambda2_minus_bound"])
        for p, v in rows:
            if p not in cache:
                cache[p] = prime_index(p)
            w.writerow([cache[p], p, repr(float(v))])
    return len(rows)


def same_records(a, b) -> bool:
    """Compare record sets ignoring timing fields."""
    def strip(r):
        r = dict(r)
        r.pop("wall_time", None)
        r.pop("runtimes", None)
        return json.dumps(r, sort_keys=True)
    return sorted(map(strip, a)) == sorted(map(strip, b))


__all__ = ["ExperimentConfig", "run", "run_unit", "summarize", "read_records",
           "write_figure_csv", "same_records", "MEASUREMENTS"]
