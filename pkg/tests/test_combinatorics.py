import pytest
from hypothesis import given, strategies as st

from fragmenta import combinatorics as cb
from fragmenta.classical import enumerate_sectors
from fragmenta.models import ghz


@given(st.integers(2, 5), st.integers(1, 6), st.integers(0, 12))
def test_dk_recurrence(q, k, extra):
    L = 3 * k + extra
    assert cb.dk_recurrence_holds(q, k, L)


def test_dk_rejects_overfull():
    with pytest.raises(ValueError):
        cb.dk_closed(2, 3, 8)


@pytest.mark.parametrize("q,kmax", [(2, 6), (3, 3)])
def test_all_mobile_matches_enumeration(q, kmax):
    for k in range(1, kmax + 1):
        cat = enumerate_sectors(ghz(q), 3 * k)
        assert cat.sizes[cat.sector_of("0" * 3 * k)] == cb.all_mobile_count(q, k)


@pytest.mark.parametrize("q", [2, 3, 4])
@pytest.mark.parametrize("k", range(1, 9))
def test_all_mobile_is_dk_at_full_filling(q, k):
    assert cb.all_mobile_count(q, k) == cb.dk_closed(q, k, 3 * k)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_frozen_closed_forms(q):
    for L in range(1, 40):
        assert cb.frozen_closed("triplet", L, q) == cb.frozen_recurrence("triplet", L, q)


def test_cyclic_closed_form():
    assert [cb.frozen_closed("cyclic", L) for L in range(1, 40)] == \
        [cb.frozen_recurrence("cyclic", L) for L in range(1, 40)]


@given(st.integers(1, 60))
def test_fibonacci_identity(L):
    t = cb.frozen_totals(L)
    assert t["product"] + t["entangled"] == t["total"]


@given(st.integers(1, 40))
def test_tl_dims_sum_to_catalan_count(L):
    # sum_j dim(Delta_j)^2 counts TL basis diagrams: Catalan(L)
    from math import comb
    total = sum(cb.tl_standard_dim(L, j) ** 2 for j in range(L % 2, L + 1, 2))
    assert total == comb(2 * L, L) // (L + 1)


@pytest.mark.parametrize("L", [6, 9, 12, 15, 18])
def test_ghz_charges_add_up(L):
    a, b = cb.ghz_charge_dims(L)
    assert a + b == cb.quantum_dim(L // 3, L) and abs(a - b) == 1
