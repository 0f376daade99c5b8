"""Compare the compiled kernels with the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--p 1000003] [--affine-p 1499] [--group-p 101] [--repeat 3]

Times neighbor generation, a single BFS, component labelling and one
64-source bit-parallel BFS on the projective, affine and full-group graphs,
and checks that both backends return identical arrays.
"""

import argparse
import time

import numpy as np

from sl2graphs import _kernels
from sl2graphs.graph import build_schreier
from sl2graphs.groups import VertexSpace, fixed_generators_S


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, list):
        return a == b
    return np.array_equal(np.asarray(a), np.asarray(b))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=1000003, help="projective-line prime")
    ap.add_argument("--affine-p", type=int, default=1499)
    ap.add_argument("--group-p", type=int, default=101)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels.compiled is None:
        raise SystemExit("compiled extension not built; run pip install -e . first")
    backends = {"cython": _kernels.compiled, "numpy": _kernels.fallback}

    cases = [(VertexSpace.projective(args.p), args.p), (VertexSpace.affine(args.affine_p), args.affine_p),
             (VertexSpace.group(args.group_p), args.group_p)]
    print(f"{'kernel':<32}{'n':>10}{'cython s':>12}{'numpy s':>12}{'speedup':>10}  match")
    for space, p in cases:
        gens = fixed_generators_S(p)
        graph = build_schreier(space, gens)
        n = graph.n
        mats = gens.matrices()
        sources = np.arange(min(64, n), dtype=np.int64)

        def jobs(kern):
            inv = kern.inverse_table(p)
            return {
                "neighbors": lambda: kern.schreier_neighbors(int(space.kind), p, mats, inv, 0, n),
                "bfs": lambda: (kern.bfs(graph.offsets, graph.neighbors, 0, dist := np.empty(n, np.uint16)), dist),
                "components": lambda: kern.components(graph.offsets, graph.neighbors),
                "multi_source_bfs(64)": lambda: kern.multi_source_bfs(graph.offsets, graph.neighbors, sources),
            }

        jc, jn = jobs(backends["cython"]), jobs(backends["numpy"])
        for name in jc:
            tc, oc = best_of(jc[name], args.repeat)
            tn, on = best_of(jn[name], args.repeat)
            label = f"{space.name}:{name}"
            print(f"{label:<32}{n:>10}{tc:>12.4f}{tn:>12.4f}{tn / tc:>10.1f}  {same(oc, on)}")


if __name__ == "__main__":
    main()
