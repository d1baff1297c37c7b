from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fragmenta.classical import enumerate_sectors
from fragmenta.entanglement import (
    IDENTITY, depth_count, efs_entropy, entropy_chain_rule, entropy_profile, fit_sqrt_scaling,
    inverse, parse_element, reduce, reduce_indices, sample_bridge_walks, schmidt_weights,
    sector_words, svd_entropy,
)
from fragmenta.models import asymmetric, sector_terms
from fragmenta.quantum import compute_efs


def _reduce_naive(word: str) -> str:
    s = word
    while "000" in s or "111" in s:
        s = s.replace("000", "", 1) if "000" in s else s.replace("111", "", 1)
    return s


@given(st.text(alphabet="01", max_size=20))
def test_reduction_matches_naive_deletion(w):
    # deletion order does not matter in the free product of two Z3
    assert reduce(w).word == _reduce_naive(w)


@given(st.text(alphabet="01", max_size=12), st.text(alphabet="01", max_size=12))
def test_group_law(a, b):
    ga, gb = reduce(a), reduce(b)
    assert ga * gb == reduce(a + b)
    assert ga * inverse(ga) == IDENTITY


@pytest.mark.parametrize("L", [3, 6, 9, 12])
def test_depth_counts_match_enumeration(L):
    lengths, values = reduce_indices(np.arange(2**L), L)
    for d, v in set(zip(lengths.tolist(), values.tolist())):
        assert depth_count(L, d) == int(np.sum((lengths == d) & (values == v)))


def test_l9_schmidt_table():
    d = schmidt_weights(9, 4)
    assert sorted(d.exact, reverse=True) == [Fraction(12, 38)] * 2 + [Fraction(4, 38)] * 2 + [Fraction(1, 38)] * 6
    assert round(efs_entropy(9, 4), 3) == 2.563


@pytest.mark.parametrize("gamma", [1.0, 0.5, 0.2])
@pytest.mark.parametrize("L", [6, 7, 8, 9])
def test_combinatorial_matches_svd_of_kernel(L, gamma):
    m = asymmetric(gamma, 1.0)
    cat = enumerate_sectors(m, L)
    for s in cat.mobile():
        mem = cat.members(int(s))
        v = compute_efs(sector_terms(m, mem, L)).basis[:, 0]
        cf = reduce(cat.normal_form(int(s)).remainder_string())
        for la in range(1, L):
            assert abs(svd_entropy(mem, v, L, la) - efs_entropy(L, la, cf, gamma)) < 1e-9


def test_profile_is_symmetric_for_identity():
    prof = [s for _, s in entropy_profile(12)]
    assert np.allclose(prof, prof[::-1])


def test_chain_rule_adds_up():
    d = schmidt_weights(12, 6, IDENTITY, 0.5)
    rad, ang = entropy_chain_rule(d)
    assert np.isclose(rad + ang, efs_entropy(12, 6, IDENTITY, 0.5))


def test_invalid_inputs():
    with pytest.raises(ValueError):
        schmidt_weights(9, 0)
    with pytest.raises(ValueError):
        schmidt_weights(9, 4, "0")
    with pytest.raises(ValueError):
        schmidt_weights(9, 4, IDENTITY, -1.0)
    with pytest.raises(ValueError):
        parse_element("000")


def test_bases():
    assert np.isclose(efs_entropy(9, 4, base="e"), efs_entropy(9, 4) * np.log(2))


def test_sqrt_fit_on_exact_data():
    pts = [(L, 0.7 * np.sqrt(L)) for L in (6, 9, 12, 15)]
    fit = fit_sqrt_scaling(pts)
    assert np.isclose(fit.slope, 0.7) and np.isclose(fit.r2, 1.0)


def test_sector_words_size():
    assert len(sector_words(12)) == 196
    assert len(sector_words(10, "0")) == len(sector_words(10, "1"))


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_bridge_profiles_start_and_end(seed):
    b = sample_bridge_walks(12, "e", 50, np.random.default_rng(seed))
    assert np.all(b.profiles[:, 0] == 0) and np.all(b.profiles[:, -1] == 0)
    assert set(np.diff(b.profiles, axis=1).ravel().tolist()) <= {1, -2}
