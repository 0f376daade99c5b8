import numpy as np
import pytest

from sl2graphs import groups
from sl2graphs.errors import ConfigError, NotConnected, NotHermitian
from sl2graphs.graph import SchreierGraph, build_schreier, is_connected
from sl2graphs.groups import VertexSpace
from sl2graphs.primes import primes_between
from sl2graphs.spectra import EigenRequest, dense_eigenvalues, extreme_nontrivial, graph_spectrum


def test_small_dense_examples():
    assert np.allclose(dense_eigenvalues([[0, 1], [1, 0]]), [-1, 1])
    c4 = SchreierGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert np.allclose(graph_spectrum(c4), [-2, 0, 0, 2])


def test_dense_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        dense_eigenvalues([[0, 1], [0, 0]])
    with pytest.raises(ConfigError):
        dense_eigenvalues(np.eye(3), limit=2)
    with pytest.raises(ConfigError):
        EigenRequest(tolerance=0)


def _closed_walks(graph, length):
    # count closed walks of the given length straight from the neighbor lists
    n = graph.n
    total = 0
    for s in range(n):
        cur = {s: 1}
        for _ in range(length):
            nxt = {}
            for v, c in cur.items():
                for w in graph.neighbors_of(v):
                    nxt[int(w)] = nxt.get(int(w), 0) + c
            cur = nxt
        total += cur.get(s, 0)
    return total


def test_trace_identities():
    for gens, space in ((groups.lps_generators(13), VertexSpace.projective(13)),
                        (groups.fixed_generators_S(7), VertexSpace.affine(7)),
                        (groups.random_symmetric_generators(1, 2, 11), VertexSpace.projective(11))):
        g = build_schreier(space, gens)
        ev = graph_spectrum(g)
        assert abs(ev.sum() - g.self_loop_count()) <= 1e-8 * g.n * g.k
        assert abs((ev**2).sum() - _closed_walks(g, 2)) <= 1e-8 * g.n * g.k
        assert abs((ev**3).sum() - _closed_walks(g, 3)) <= 1e-7 * g.n * g.k


def test_lps_p13_two_walks_equal_nk():
    g = build_schreier(VertexSpace.projective(13), groups.lps_generators(13))
    if g.self_loop_count() == 0:
        assert abs((graph_spectrum(g) ** 2).sum() - g.n * g.k) < 1e-9


def test_complete_graph_k5():
    k5 = SchreierGraph.from_edges(5, [(i, j) for i in range(5) for j in range(i + 1, 5)])
    r = extreme_nontrivial(k5)
    assert abs(r.lambda2 + 1) < 1e-12 and abs(r.lambda_min + 1) < 1e-12


def test_lps_p13_matches_dense():
    g = build_schreier(VertexSpace.projective(13), groups.lps_generators(13))
    ev = graph_spectrum(g)
    r = extreme_nontrivial(g)
    assert abs(r.lambda2 - ev[-2]) < 1e-7
    assert r.lambda2 < 4


def test_bipartite_removes_minus_k():
    c6 = SchreierGraph.from_edges(6, [(i, (i + 1) % 6) for i in range(6)])
    r = extreme_nontrivial(c6)
    assert r.bipartite and abs(r.lambda2 - 1) < 1e-12 and abs(r.lambda_min + 1) < 1e-12


def test_not_connected():
    two = SchreierGraph.from_edges(4, [(0, 1), (0, 1), (2, 3), (2, 3)])
    with pytest.raises(NotConnected):
        extreme_nontrivial(two)


def test_iterative_vs_dense_twenty_graphs():
    primes = [p for p in primes_between(401, 2999)][::18][:20]
    assert len(primes) == 20
    for i, p in enumerate(primes):
        g = build_schreier(VertexSpace.projective(p), groups.random_symmetric_generators(i, 2, p))
        if not is_connected(g):
            continue
        it = extreme_nontrivial(g, EigenRequest(seed=i))
        assert it.method == "lanczos"
        ev = graph_spectrum(g)
        ev = np.delete(ev, np.argmax(ev))
        if it.bipartite:
            ev = np.delete(ev, np.argmin(ev))
        assert abs(it.lambda2 - ev[-1]) <= 1e-6
        assert abs(it.lambda_min - ev[0]) <= 1e-6
        assert max(it.residuals.values()) <= 1e-8 * g.k


def test_lower_false_skips_smallest():
    p = 1009
    g = build_schreier(VertexSpace.projective(p), groups.fixed_generators_S(p))
    r = extreme_nontrivial(g, lower=False)
    assert np.isnan(r.lambda_min) and set(r.residuals) == {"LA"}
