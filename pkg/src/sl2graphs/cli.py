"""Command line interface.

Exit codes: 0 success, 2 configuration or usage error, 3 numerical
non-convergence, 1 any other library error.  Diagnostics go to stderr as
one JSON object.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import __version__
from .desymmetrize import (
    WHOLE,
    SpectrumSample,
    kramers_reduce,
    monochromatic_spectrum,
    steinberg_spectrum,
)
from .errors import ConfigError, NoConvergence, NotConnected, Sl2GraphsError
from .experiments import ExperimentConfig, read_records, run, summarize, write_figure_csv
from .graph import build_schreier, is_bipartite, is_connected
from .groups import SpaceKind, VertexSpace, make_generators
from .metrics import diameter, girth_at_identity, radius_at
from .spectra import EigenRequest, extreme_nontrivial, graph_spectrum
from .stats import (
    discrepancy,
    goe_density,
    km_density,
    ramanujan_bound,
    spacing_ks,
    unfold_spacings,
    write_histogram_csv,
)


class UsageError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(sp, space="projective"):
    sp.add_argument("--p", type=int, required=True, help="prime modulus (or n for --space perm)")
    sp.add_argument("--family", default="fixed", choices=["fixed", "lps", "random", "perm"])
    sp.add_argument("--space", default=space, choices=["projective", "affine", "group", "perm"])
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--d", type=int, default=2, help="random sets have 2d elements")
    sp.add_argument("--out", default=None)
    sp.add_argument("--format", default="jsonl", choices=["jsonl", "csv"])
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--tol", type=float, default=1e-8)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sl2graphs", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("spectrum", help="sector or whole-graph spectrum")
    _common(sp)
    sp.add_argument("--sector", default="auto",
                    help="auto, whole, steinberg, or a character index j (affine)")
    sp = sub.add_parser("top-eig", help="top nontrivial eigenvalue vs 2 sqrt(k-1)")
    _common(sp)
    sp = sub.add_parser("diameter", help="exact diameter")
    _common(sp)
    sp = sub.add_parser("radius", help="eccentricity of one vertex")
    _common(sp)
    sp.add_argument("--vertex", type=int, default=0)
    sp = sub.add_parser("girth", help="shortest relators at the identity")
    _common(sp, space="group")
    sp.add_argument("--max-vertices", type=int, default=2_000_000)
    for name in ("spacings", "discrepancy"):
        sp = sub.add_parser(name, help=f"{name} of the sector spectrum")
        _common(sp)
        sp.add_argument("--j", type=int, default=1, help="character index for the affine space")
        if name == "spacings":
            sp.add_argument("--bins", type=int, default=30)
    sp = sub.add_parser("sweep", help="run an experiment config")
    sp.add_argument("config")
    sp.add_argument("--out", default=None)
    sp.add_argument("--threads", type=int, default=None)
    sp = sub.add_parser("summarize", help="summary statistics of sweep output")
    sp.add_argument("files", nargs="+")
    sp.add_argument("--measurement", default="top_eig")
    sp.add_argument("--bins", type=int, default=20)
    sp.add_argument("--figure-csv", default=None)
    sp.add_argument("--out", default=None)
    return ap


def _emit(obj, args):
    text = json.dumps(obj)
    if getattr(args, "out", None):
        with open(args.out, "a") as fh:
            fh.write(text + "\n")
    print(text)


def _setup(args):
    space = VertexSpace(SpaceKind.parse(args.space), args.p)
    gens = make_generators(args.family, args.p, seed=args.seed, d=args.d)
    return space, gens


def _graph(args):
    space, gens = _setup(args)
    graph = build_schreier(space, gens)
    if not is_connected(graph):
        raise NotConnected(f"{args.family} generators do not connect the {args.space} graph at p={args.p}")
    return space, gens, graph


def _sample(args, j=None) -> SpectrumSample:
    space, gens = _setup(args)
    sector = str(getattr(args, "sector", "auto")).lower()
    if space.kind is SpaceKind.AFFINE and sector not in ("whole",):
        jj = j if j is not None else (int(sector) if sector.isdigit() else 1)
        return monochromatic_spectrum(args.p, gens, jj)
    graph = build_schreier(space, gens)
    ev = graph_spectrum(graph)
    if sector == "whole":
        return SpectrumSample(ev, WHOLE, gens.k, args.p)
    if not is_connected(graph):
        raise NotConnected("graph is not connected")
    bip = is_bipartite(graph)[0]
    if space.kind is SpaceKind.PROJECTIVE:
        return steinberg_spectrum(ev, gens.k, bip, p=args.p)
    ev = np.sort(ev)[:-1]
    return SpectrumSample(ev[1:] if bip else ev, WHOLE, gens.k, args.p)


def cmd_spectrum(args):
    s = _sample(args)
    s.provenance.update({"family": args.family, "seed": args.seed, "space": args.space})
    if args.format == "csv":
        fh = open(args.out, "w", newline="") if args.out else sys.stdout
        try:
            w = csv.writer(fh)
            w.writerow(["index", "eigenvalue"])
            for i, v in enumerate(s.eigenvalues):
                w.writerow([i, repr(float(v))])
        finally:
            if fh is not sys.stdout:
                fh.close()
        return
    _emit(s.to_json(), args)


def cmd_top_eig(args):
    if args.space == "affine":
        from .desymmetrize import affine_extreme
        _, gens = _setup(args)
        hi, lo = affine_extreme(args.p, gens, tol=args.tol)
        k = gens.k
    else:
        _, gens, graph = _graph(args)
        r = extreme_nontrivial(graph, EigenRequest(tolerance=args.tol, seed=args.seed))
        hi, lo, k = r.lambda2, r.lambda_min, graph.k
    bound = ramanujan_bound(k)
    _emit({"p": args.p, "family": args.family, "space": args.space, "seed": args.seed,
           "lambda2": hi, "lambda_min": lo, "bound": bound, "lambda2_minus_bound": hi - bound}, args)


def cmd_diameter(args):
    _, _, graph = _graph(args)
    _emit({"p": args.p, "family": args.family, "space": args.space,
           "diameter": diameter(graph, transitive_hint=args.space == "group")}, args)


def cmd_radius(args):
    _, _, graph = _graph(args)
    _emit({"p": args.p, "family": args.family, "space": args.space, "vertex": args.vertex,
           "radius": radius_at(graph, args.vertex)}, args)


def cmd_girth(args):
    _, gens = _setup(args)
    g = girth_at_identity(gens, max_vertices=args.max_vertices)
    _emit({"p": args.p, "family": args.family, **g.__dict__}, args)


def cmd_spacings(args):
    s = kramers_reduce(_sample(args, j=args.j))
    sp = unfold_spacings(s, s.k)
    if args.format == "csv":
        if not args.out:
            raise ConfigError("--format csv needs --out")
        write_histogram_csv(args.out, sp, bins=args.bins, value_range=(0, 4), density=goe_density)
        return
    _emit({"p": args.p, "sector": s.sector, "count": int(sp.size),
           **{m: spacing_ks(sp, m) for m in ("goe", "gse", "poisson")}}, args)


def cmd_discrepancy(args):
    s = _sample(args, j=args.j)
    if args.format == "csv":
        if not args.out:
            raise ConfigError("--format csv needs --out")
        r = 2 * np.sqrt(s.k - 1)
        write_histogram_csv(args.out, s.eigenvalues, bins=40, value_range=(-r, r),
                            density=lambda x: km_density(s.k, x))
        return
    _emit({"p": args.p, "sector": s.sector, "discrepancy": discrepancy(s, s.k)}, args)


def cmd_sweep(args):
    cfg = ExperimentConfig.load(args.config)
    n = 0
    for rec in run(cfg, output=args.out, threads=args.threads):
        n += 1
        print(json.dumps({"p": rec["p"], "seed": rec["seed"], "connected": rec["connected"],
                          "errors": sorted(rec["errors"])}))
    print(json.dumps({"written": n, "output": args.out or cfg.output}), file=sys.stderr)


def cmd_summarize(args):
    records = [r for f in args.files for r in read_records(f)]
    out = summarize(records, args.measurement, bins=args.bins)
    if args.figure_csv:
        out["figure_rows"] = write_figure_csv(records, args.figure_csv)
    _emit(out, args)


COMMANDS = {"spectrum": cmd_spectrum, "top-eig": cmd_top_eig, "diameter": cmd_diameter,
            "radius": cmd_radius, "girth": cmd_girth, "spacings": cmd_spacings,
            "discrepancy": cmd_discrepancy, "sweep": cmd_sweep, "summarize": cmd_summarize}


def _fail(code, exc):
    print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}),
          file=sys.stderr)
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args)
    except NoConvergence as exc:
        return _fail(3, exc)
    except ConfigError as exc:
        return _fail(2, exc)
    except Sl2GraphsError as exc:
        return _fail(1, exc)
    except OSError as exc:
        return _fail(1, exc)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
