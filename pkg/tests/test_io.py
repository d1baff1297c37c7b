import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fragmenta.io import (
    canonical_json, csv_text, derive_rng, read_matrix, seed_sequence, sha256_file, thread_count,
    write_matrix, write_text,
)


@given(st.dictionaries(st.text(max_size=5), st.one_of(st.integers(), st.floats(allow_nan=False,
       allow_infinity=False), st.text(max_size=5)), max_size=6))
def test_canonical_json_roundtrip_and_order_independent(d):
    text = canonical_json(d)
    assert json.loads(text) == d
    assert canonical_json(dict(reversed(list(d.items())))) == text


def test_json_rejects_nan():
    with pytest.raises(ValueError):
        canonical_json({"x": float("nan")})


def test_csv_float_precision():
    text = csv_text(["x"], [[0.1 + 0.2]])
    assert float(text.splitlines()[1]) == 0.1 + 0.2


def test_matrix_roundtrip(tmp_path):
    M = np.random.default_rng(0).normal(size=(5, 5))
    p, side = write_matrix(tmp_path / "h.bin", M, {"dim": 5})
    assert np.array_equal(read_matrix(p), M)
    assert json.loads(side.read_text()) == {"dim": 5}
    with pytest.raises(ValueError):
        write_matrix(tmp_path / "bad.bin", np.zeros((2, 3)))


def test_seed_streams_are_split():
    a = derive_rng(1, "spectra", 0, 0).random(4)
    assert np.array_equal(a, derive_rng(1, "spectra", 0, 0).random(4))
    assert not np.array_equal(a, derive_rng(1, "spectra", 0, 1).random(4))
    assert not np.array_equal(a, derive_rng(1, "bridge", 0, 0).random(4))
    with pytest.raises(ValueError):
        seed_sequence(-1, "x")


def test_thread_count(monkeypatch):
    monkeypatch.setenv("FRAGMENTA_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("FRAGMENTA_THREADS", "many")
    with pytest.raises(ValueError):
        thread_count()


def test_sha256_stable(tmp_path):
    p = write_text(tmp_path / "a.txt", "abc")
    assert sha256_file(p) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
