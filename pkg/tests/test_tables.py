import numpy as np
import pytest

from fragmenta.classical import enumerate_sectors
from fragmenta.models import model_from_name, sector_terms
from fragmenta.quantum import compute_efs, decompose_sector
from fragmenta.tables import (
    SECTOR_TABLES, UnknownTableError, known_tables, parse_blocks, reproduce_table,
)

from .test_quantum import commutant_dim


def test_parse_blocks():
    assert parse_blocks("1^3+2") == (3, (2,))
    assert parse_blocks("1+18+19") == (1, (18, 19))


def test_table_histograms_sum_to_hilbert_space():
    for t in SECTOR_TABLES.values():
        q = 3 if "q3" in t.table_id or "cyclic" in t.table_id else 2
        assert sum(D * c for D, c in t.histogram().items()) == q**t.L, t.table_id


@pytest.mark.parametrize("table_id", ["SM-q2-L6", "SM-q3-L6", "cyclic-L6", "TL-TableII-L6", "TableI-L9"])
def test_small_tables_reproduce(table_id):
    rep = reproduce_table(table_id)
    assert rep.ok, [c.to_dict() for c in rep.failures()]
    assert rep.max_residual < 1e-8


def test_unknown_table():
    with pytest.raises(UnknownTableError):
        reproduce_table("SM-q5-L4")
    assert "cyclic-L9-overview" in known_tables()


@pytest.mark.slow
def test_q3_l9_87_state_sectors_have_two_block_patterns():
    # the independent commutant dimension fixes the number of irreducible blocks
    m = model_from_name("ghz3")
    cat = enumerate_sectors(m, 9)
    found = {}
    for s in cat.mobile():
        if cat.sizes[s] != 87:
            continue
        d = decompose_sector(m, cat, int(s), np.random.default_rng(int(s)))
        found.setdefault(tuple(d.block_dims()), int(s))
    assert set(found) == {(7, 7, 7, 32), (7, 7, 39)}
    for dims, s in found.items():
        terms = sector_terms(m, cat.members(s), 9)
        assert commutant_dim(terms, compute_efs(terms)) == len(dims)
