import numpy as np
import pytest
from hypothesis import given, strategies as st

from fragmenta.words import (
    InvalidWordError, RewriteRule, Word, build_delta_table, decode_array, decode_index,
    encode_array, encode_word, normal_form, pattern_code,
)


@st.composite
def words(draw, max_len=12):
    q = draw(st.integers(2, 4))
    L = draw(st.integers(1, max_len))
    return Word(tuple(draw(st.lists(st.integers(0, q - 1), min_size=L, max_size=L))), q)


@given(words())
def test_encode_decode_roundtrip(w):
    assert decode_index(encode_word(w), w.L, w.q) == w


@given(words())
def test_index_matches_int_parse(w):
    assert w.index == int(str(w), w.q)


def test_big_endian():
    assert Word.from_string("100", 2).index == 4
    assert str(decode_index(1, 3, 2)) == "001"


@pytest.mark.parametrize("text,q", [("012", 2), ("a1", 3), ("13", 3)])
def test_invalid_words(text, q):
    with pytest.raises(InvalidWordError):
        Word.from_string(text, q)


def test_decode_out_of_range():
    with pytest.raises(InvalidWordError):
        decode_index(8, 3, 2)


@given(st.integers(2, 4), st.integers(1, 8), st.data())
def test_array_codec(q, L, data):
    idx = np.array(data.draw(st.lists(st.integers(0, q**L - 1), min_size=1, max_size=20)))
    assert np.array_equal(encode_array(decode_array(idx, L, q), q), idx)


def test_delta_table_shift_applies_rewrite():
    flip = RewriteRule.from_strings(["000", "111"], 2)
    t = build_delta_table([flip], 5, 2)
    w = Word.from_string("01110", 2)
    c = pattern_code((1, 1, 1), 2)
    assert str(decode_index(w.index + int(t.shifts[1, c]), 5, 2)) == "00000"


def test_rule_overlap_rejected():
    a = RewriteRule.from_strings(["000", "111"], 2)
    b = RewriteRule.from_strings(["111", "010"], 2)
    with pytest.raises(ValueError):
        build_delta_table([a, b], 4, 2)


def test_window_longer_than_chain():
    with pytest.raises(ValueError):
        build_delta_table([RewriteRule.from_strings(["000", "111"], 2)], 2, 2)


@given(st.lists(st.integers(0, 1), min_size=0, max_size=14))
def test_normal_form_is_invariant_under_flips(symbols):
    # replacing any 000 window by 111 (and back) keeps the normal form
    flip = RewriteRule.from_strings(["000", "111"], 2)
    nf = normal_form(symbols, [flip])
    for i in range(len(symbols) - 2):
        win = tuple(symbols[i:i + 3])
        if win in ((0, 0, 0), (1, 1, 1)):
            other = list(symbols)
            other[i:i + 3] = [1 - win[0]] * 3
            assert normal_form(other, [flip]) == nf
    # the remainder never contains a class pattern
    rem = nf.remainder
    assert all(rem[i:i + 3] not in ((0, 0, 0), (1, 1, 1)) for i in range(len(rem) - 2))
    assert 3 * nf.k + len(rem) == len(symbols)
