"""Deterministic output formats and seed splitting.

JSON is canonical (sorted keys, fixed separators) so checksums are stable.
CSV uses ``.`` decimals, ``\\n`` line endings and a header row.  Dense
Hamiltonians are written as a flat little-endian float64 row-major file
preceded by a one-line JSON header, with a JSON sidecar describing the basis.
"""
from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import os
import zlib
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np


def _default(obj: Any) -> Any:
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj: Any) -> str:
    """Canonical JSON text (sorted keys, no trailing whitespace, final newline).

    >>> canonical_json({"b": 1, "a": [1.5, 2]})
    '{"a": [1.5, 2], "b": 1}\\n'
    """
    return json.dumps(obj, sort_keys=True, default=_default, allow_nan=False) + "\n"


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """CSV text with a header row; floats use ``repr`` precision.

    >>> csv_text(["a", "b"], [[1, 0.5]])
    'a,b\\n1,0.5\\n'
    """
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _cell(v: Any) -> Any:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def write_text(path: str | os.PathLike, text: str) -> Path:
    p = Path(path)
    if p.parent != Path(""):
        p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return p


def sha256_file(path: str | os.PathLike) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_matrix(path: str | os.PathLike, M: np.ndarray, meta: dict | None = None) -> tuple[Path, Path]:
    """Write ``M`` as ``<json header>\\n`` plus raw float64 row-major data, and a ``.json`` sidecar."""
    M = np.ascontiguousarray(M, dtype="<f8")
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expected a square matrix")
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    header = json.dumps({"dim": int(M.shape[0]), "dtype": "<f8", "order": "C"}, sort_keys=True)
    with open(p, "wb") as fh:
        fh.write(header.encode() + b"\n")
        fh.write(M.tobytes(order="C"))
    side = p.with_suffix(p.suffix + ".json")
    write_text(side, canonical_json(meta or {}))
    return p, side


def read_matrix(path: str | os.PathLike) -> np.ndarray:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode())
        data = np.frombuffer(fh.read(), dtype=header["dtype"])
    n = header["dim"]
    if data.size != n * n:
        raise ValueError("truncated matrix file")
    return data.reshape(n, n).copy()


# ----------------------------------------------------------------- seeds

def seed_sequence(seed: int, command: str, sector: int = 0, realization: int = 0) -> np.random.SeedSequence:
    """Seed splitting ``seed -> command -> sector -> realization``.

    The command name enters through its CRC-32 so that different commands
    draw independent streams from the same user seed.
    """
    if not 0 <= int(seed) < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    key = (zlib.crc32(command.encode()), int(sector), int(realization))
    return np.random.SeedSequence(int(seed), spawn_key=key)


def derive_rng(seed: int, command: str, sector: int = 0, realization: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(seed, command, sector, realization))


def thread_count() -> int:
    """Worker count from ``FRAGMENTA_THREADS`` (default 1)."""
    raw = os.environ.get("FRAGMENTA_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"FRAGMENTA_THREADS must be an integer, got {raw!r}") from exc
    return max(1, n)
