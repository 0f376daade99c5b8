import numpy as np
import pytest

from sl2graphs import groups
from sl2graphs.desymmetrize import (
    SpectrumSample,
    affine_extreme,
    affine_spectrum_by_sectors,
    irreducible_characters,
    kramers_reduce,
    monochromatic_spectrum,
    steinberg_spectrum,
    torus_sector_blocks,
    torus_structure,
)
from sl2graphs.errors import ConfigError, MissingTrivialEigenvalue, NotSymmetric, SizeOverflow
from sl2graphs.graph import build_schreier, is_bipartite
from sl2graphs.groups import VertexSpace
from sl2graphs.spectra import extreme_nontrivial, graph_spectrum


def _sets(p):
    return [groups.fixed_generators_S(p)] + [groups.random_symmetric_generators(s, 2, p) for s in range(5)]


@pytest.mark.parametrize("p", [5, 7, 13])
def test_block_union_equals_affine_spectrum(p):
    for gens in _sets(p):
        dense = np.sort(graph_spectrum(build_schreier(VertexSpace.affine(p), gens)))
        assert np.max(np.abs(affine_spectrum_by_sectors(p, gens) - dense)) < 1e-8


def test_p13_union_has_168_values():
    blocks = torus_sector_blocks(13, groups.fixed_generators_S(13))
    assert len(blocks) == 12
    assert sum(b.matrix.shape[0] for b in blocks) == 168


@pytest.mark.parametrize("p", [5, 7, 13, 31])
def test_block_invariants(p):
    for gens in _sets(p)[:3]:
        st = torus_structure(p, gens)
        proj = build_schreier(VertexSpace.projective(p), gens).dense()
        b0 = st.dense_block(0)
        assert np.array_equal(b0.real, proj) and not np.any(b0.imag)
        for j in range(p - 1):
            m = st.dense_block(j)
            assert m.shape == (p + 1, p + 1)
            assert np.max(np.abs(m - m.conj().T)) < 1e-12
            assert np.all(np.abs(m).sum(axis=0) <= gens.k + 1e-12)
            ev = np.linalg.eigvalsh(m)
            assert np.max(np.abs(ev)) <= gens.k + 1e-9


def test_conjugate_pair_symmetry():
    p = 13
    gens = groups.random_symmetric_generators(4, 2, p)
    for j in range(1, p - 1):
        a = monochromatic_spectrum(p, gens, j).eigenvalues
        b = monochromatic_spectrum(p, gens, p - 1 - j).eigenvalues
        assert np.max(np.abs(a - b)) < 1e-9


def test_hermitian_residual_p13_j1():
    st = torus_structure(13, groups.fixed_generators_S(13))
    m = st.dense_block(1)
    w, v = np.linalg.eig(m)
    assert np.max(np.abs(w.imag)) < 1e-10


def test_other_lift_gives_same_spectrum():
    # rescaling representative v_P by a^s_P conjugates block j by a diagonal unitary
    p = 13
    gens = groups.fixed_generators_S(p)
    st = torus_structure(p, gens)
    rng = np.random.default_rng(0)
    s = rng.integers(0, p - 1, size=p + 1)
    for j in (1, 2, 5):
        d = np.exp(2j * np.pi * j * s / (p - 1))
        m = st.dense_block(j)
        conj = np.diag(d.conj()) @ m @ np.diag(d)
        assert np.allclose(np.linalg.eigvalsh(conj), np.linalg.eigvalsh(m), atol=1e-12)


def test_steinberg_examples():
    s = steinberg_spectrum([4, 1, 1, -2, -2, -2], 4)
    assert list(s.eigenvalues) == [-2, -2, -2, 1, 1]
    assert s.sector == "Steinberg"
    with pytest.raises(MissingTrivialEigenvalue):
        steinberg_spectrum([4, 4, 1, 1, -2, -2], 4)
    with pytest.raises(MissingTrivialEigenvalue):
        steinberg_spectrum([3, 1, 0], 4)
    b = steinberg_spectrum([4, 0, 0, -4], 4, bipartite=True)
    assert list(b.eigenvalues) == [0, 0]


def test_steinberg_from_graph_length():
    for p in (13, 37, 101):
        g = build_schreier(VertexSpace.projective(p), groups.lps_generators(p) if p % 12 == 1
                           else groups.fixed_generators_S(p))
        ev = graph_spectrum(g)
        s = steinberg_spectrum(ev, 4, is_bipartite(g)[0])
        assert len(s) == len(ev) - 1 - int(is_bipartite(g)[0])


def test_monochromatic_errors():
    gens = groups.fixed_generators_S(13)
    with pytest.raises(ConfigError):
        monochromatic_spectrum(13, gens, 0)
    with pytest.raises(ConfigError):
        monochromatic_spectrum(13, gens, 12)
    with pytest.raises(SizeOverflow):
        torus_structure(20021, groups.fixed_generators_S(20021))
    with pytest.raises(NotSymmetric):
        torus_structure(13, groups.lps_generators(13))


def test_kramers_pairs_in_odd_sectors():
    p = 101
    gens = groups.random_symmetric_generators(2, 2, p)
    for j in (1, 3, 7):
        s = monochromatic_spectrum(p, gens, j)
        ev = s.eigenvalues
        assert np.max(np.abs(ev[0::2] - ev[1::2])) < 1e-9
        r = kramers_reduce(s)
        assert len(r) == (p + 1) // 2 and r.provenance["kramers_pairs"]
    s = monochromatic_spectrum(p, gens, 2)
    assert kramers_reduce(s) is s


def test_irreducible_characters():
    assert irreducible_characters(13) == [1, 2, 3, 4, 5, 7, 8, 9, 10, 11]


def test_spectrum_sample_roundtrip():
    s = monochromatic_spectrum(13, groups.fixed_generators_S(13), 1)
    back = SpectrumSample.from_json(s.dumps())
    assert np.array_equal(back.eigenvalues, s.eigenvalues)
    assert (back.sector, back.k, back.p) == (s.sector, s.k, s.p)
    with pytest.raises(ConfigError):
        SpectrumSample([5.0], "Trivial", 4)


def test_affine_extreme_matches_dense():
    for p, seed in ((13, 0), (31, 1), (31, 2)):
        gens = groups.random_symmetric_generators(seed, 2, p)
        g = build_schreier(VertexSpace.affine(p), gens)
        r = extreme_nontrivial(g)
        hi, lo = affine_extreme(p, gens)
        assert abs(hi - r.lambda2) < 1e-8 and abs(lo - r.lambda_min) < 1e-8
    gens = groups.random_symmetric_generators(0, 2, 211)
    hi_sparse, lo_sparse = affine_extreme(211, gens, dense_below=0)
    hi_dense, lo_dense = affine_extreme(211, gens, dense_below=10**6)
    assert abs(hi_sparse - hi_dense) < 1e-7 and abs(lo_sparse - lo_dense) < 1e-7
