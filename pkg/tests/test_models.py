import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fragmenta.classical import enumerate_sectors
from fragmenta.models import (
    FIXED, Coupling, asymmetric, build_sector_hamiltonian, cyclic, digit_permutation, east,
    ghz, model_from_name, sector_terms, temperley_lieb,
)
from fragmenta.words import decode_index


def _full_h(model, L, J):
    H = np.zeros((model.q**L, model.q**L))
    for j, t in zip(J, model.local_terms(L)):
        H += j * t.embed(L)
    return H


@pytest.mark.parametrize("model", [asymmetric(), ghz(), ghz(3), cyclic(), temperley_lieb()],
                         ids=["asym", "ghz", "ghz3", "cyclic", "tl"])
def test_local_terms_are_projector_like(model):
    M = model.local_term(0).matrix
    assert np.allclose(M, M.T)
    assert np.all(np.linalg.eigvalsh(M) > -1e-12)


@pytest.mark.parametrize("model,L", [(asymmetric(), 7), (ghz(), 7), (cyclic(), 5), (temperley_lieb(), 5)])
def test_hamiltonian_never_couples_sectors(model, L):
    rng = np.random.default_rng(3)
    J = rng.uniform(0.5, 1.5, L)
    H = _full_h(model, L, J)
    cat = enumerate_sectors(model, L)
    lab = cat.labels
    off = np.abs(H[lab[:, None] != lab[None, :]])
    assert off.max(initial=0.0) == 0.0


@pytest.mark.parametrize("model,L", [(asymmetric(), 6), (cyclic(), 5)])
def test_sector_restriction_matches_full(model, L):
    cat = enumerate_sectors(model, L)
    s = cat.largest()
    mem = cat.members(s)
    terms = sector_terms(model, mem, L)
    for t, full in zip(terms, model.local_terms(L)):
        assert np.allclose(t, full.embed(L)[np.ix_(mem, mem)])


def test_sparse_and_dense_restriction_agree():
    m = ghz()
    cat = enumerate_sectors(m, 9)
    mem = cat.members(cat.largest())
    for d, s in zip(sector_terms(m, mem, 9), sector_terms(m, mem, 9, sparse=True)):
        assert np.allclose(d, s.toarray())


def test_seeded_hamiltonian_is_reproducible():
    m = asymmetric()
    cat = enumerate_sectors(m, 9)
    s = cat.largest()
    a = build_sector_hamiltonian(m, cat, s, rng=np.random.default_rng(11))
    b = build_sector_hamiltonian(m, cat, s, rng=np.random.default_rng(11))
    assert np.array_equal(a.matrix, b.matrix)
    assert np.all((a.couplings >= 0.5) & (a.couplings <= 1.5))


def test_fixed_coupling():
    m = ghz(coupling=FIXED)
    cat = enumerate_sectors(m, 6)
    sh = build_sector_hamiltonian(m, cat, cat.largest())
    assert np.all(sh.couplings == 1.0)


def test_asymmetric_normalization_and_gamma():
    m = asymmetric()
    assert np.isclose(np.linalg.norm(m.param("coeffs")), 1.0)
    assert np.isclose(m.gamma, 0.5)
    with pytest.raises(ValueError):
        asymmetric(0.0, 1.0)


def test_ghz_bit_flip_commutes():
    m = ghz()
    L = 9
    cat = enumerate_sectors(m, L)
    mem = cat.members(cat.largest())
    X = digit_permutation((1, 0), mem, L, 2)
    for t in sector_terms(m, mem, L):
        assert np.allclose(X @ t, t @ X)


def test_model_from_name_unknown():
    with pytest.raises(ValueError):
        model_from_name("nope")


def test_coupling_validation():
    with pytest.raises(ValueError):
        Coupling("uniform", lo=2.0, hi=1.0)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(0.1, 3.0))
def test_east_block_is_symmetric(t1, t2):
    B = sum(t.matrix for t in east(t1, t2).local_terms(4))
    assert np.allclose(B, B.T)


def test_tl_projectors_satisfy_jones_relation_with_loop_weight_three():
    L = 3
    e = [t.embed(L) for t in temperley_lieb().local_terms(L)]
    assert np.allclose(e[0] @ e[0], e[0])
    # normalized singlet projectors on qutrits: e_i e_{i+1} e_i = e_i / 9 = delta**-2 e_i with delta = 3
    assert np.allclose(e[0] @ e[1] @ e[0], e[0] / 9)
    assert not np.allclose(e[0] @ e[1] @ e[0], e[0] / 3)


def test_tl_module_generators_obey_jones():
    from fragmenta.models import tl_module_generators

    for j in (0, 2):
        E = tl_module_generators(6, j)
        for a, b in zip(E, E[1:]):
            assert np.allclose(a @ a, 3 * a)
            assert np.allclose(a @ b @ a, a)
