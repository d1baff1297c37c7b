"""Base-q words, integer encoding, rewrite rules and normal forms.

A word of length ``L`` over ``{0, ..., q-1}`` is identified with the
integer ``sum_i w_i q**(L-1-i)`` (site 0 is the most significant digit).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class InvalidWordError(ValueError):
    """Raised for digits outside the alphabet or indices outside ``[0, q**L)``."""


@dataclass(frozen=True)
class Word:
    """Immutable digit string over the alphabet ``{0, ..., q-1}``.

    Examples
    --------
    >>> Word.from_string("012", 3).index
    5
    >>> str(Word((1, 1, 1), 2))
    '111'
    """

    symbols: tuple[int, ...]
    q: int
    _index: int = field(default=-1, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        syms = tuple(int(s) for s in self.symbols)
        if self.q < 2:
            raise InvalidWordError(f"alphabet size must be >= 2, got {self.q}")
        for s in syms:
            if not 0 <= s < self.q:
                raise InvalidWordError(f"digit {s} not in alphabet of size {self.q}")
        object.__setattr__(self, "symbols", syms)
        idx = 0
        for s in syms:
            idx = idx * self.q + s
        object.__setattr__(self, "_index", idx)

    @classmethod
    def from_string(cls, text: str, q: int) -> "Word":
        try:
            return cls(tuple(int(ch) for ch in text), q)
        except ValueError as exc:
            if isinstance(exc, InvalidWordError):
                raise
            raise InvalidWordError(f"non-digit character in {text!r}") from exc

    @property
    def L(self) -> int:
        return len(self.symbols)

    @property
    def index(self) -> int:
        return self._index

    def __str__(self) -> str:
        return "".join(str(s) for s in self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)


def encode_word(w: Word | Sequence[int], q: int | None = None) -> int:
    """Big-endian base-q index of a word.

    Raw digit sequences are accepted when ``q`` is given.

    >>> encode_word(Word.from_string("012", 3))
    5
    """
    if isinstance(w, Word):
        return w.index
    if q is None:
        raise TypeError("q is required for raw digit sequences")
    return Word(tuple(w), q).index


def decode_index(i: int, L: int, q: int) -> Word:
    """Inverse of :func:`encode_word`.

    >>> str(decode_index(5, 3, 3))
    '012'
    """
    i = int(i)
    if not 0 <= i < q**L:
        raise InvalidWordError(f"index {i} outside [0, {q}**{L})")
    digits = [0] * L
    for pos in range(L - 1, -1, -1):
        i, digits[pos] = divmod(i, q)
    return Word(tuple(digits), q)


def decode_array(indices: np.ndarray, L: int, q: int) -> np.ndarray:
    """Vectorized decode: returns an ``(n, L)`` digit array."""
    indices = np.asarray(indices, dtype=np.int64)
    places = q ** np.arange(L - 1, -1, -1, dtype=np.int64)
    return (indices[:, None] // places[None, :]) % q


def encode_array(digits: np.ndarray, q: int) -> np.ndarray:
    """Vectorized encode of an ``(n, L)`` digit array."""
    digits = np.asarray(digits, dtype=np.int64)
    L = digits.shape[-1]
    places = q ** np.arange(L - 1, -1, -1, dtype=np.int64)
    return digits @ places


def pattern_code(pattern: Sequence[int], q: int) -> int:
    code = 0
    for s in pattern:
        code = code * q + int(s)
    return code


@dataclass(frozen=True)
class RewriteRule:
    """One equivalence class of length-``ell`` patterns.

    Any pattern of the class may be replaced by any other.  ``patterns[0]``
    is the canonical target used by directed reduction.

    Parameters
    ----------
    patterns
        The class members, as digit tuples of a common length.
    q
        Alphabet size.
    name
        Optional label (e.g. ``"X"``) used in normal-form bookkeeping.
    """

    patterns: tuple[tuple[int, ...], ...]
    q: int
    name: str = ""

    def __post_init__(self) -> None:
        pats = tuple(tuple(int(s) for s in p) for p in self.patterns)
        if not pats:
            raise ValueError("a rule needs at least one pattern")
        lengths = {len(p) for p in pats}
        if len(lengths) != 1:
            raise ValueError("all patterns of a rule must share one length")
        if len(set(pats)) != len(pats):
            raise ValueError("patterns within a rule must be distinct")
        for p in pats:
            for s in p:
                if not 0 <= s < self.q:
                    raise InvalidWordError(f"digit {s} not in alphabet of size {self.q}")
        object.__setattr__(self, "patterns", pats)

    @classmethod
    def from_strings(cls, patterns: Iterable[str], q: int, name: str = "") -> "RewriteRule":
        return cls(tuple(tuple(int(c) for c in p) for p in patterns), q, name)

    @property
    def window_len(self) -> int:
        return len(self.patterns[0])

    @property
    def codes(self) -> tuple[int, ...]:
        return tuple(pattern_code(p, self.q) for p in self.patterns)

    def __contains__(self, pattern: Sequence[int]) -> bool:
        return tuple(pattern) in self.patterns


def apply_rule_at(w: Word, rule: RewriteRule, pos: int, target: Sequence[int]) -> Word | None:
    """Replace the window at ``pos`` by ``target`` if the window is in the class.

    Returns ``None`` (no match) when the current window is not in the class
    or already equals ``target``.

    >>> str(apply_rule_at(Word.from_string("0001", 2),
    ...     RewriteRule.from_strings(["000", "111"], 2), 0, (1, 1, 1)))
    '1111'
    """
    ell = rule.window_len
    if not 0 <= pos or pos + ell > w.L:
        raise IndexError(f"window [{pos}, {pos + ell}) outside word of length {w.L}")
    target = tuple(int(s) for s in target)
    if target not in rule.patterns:
        raise ValueError(f"target {target} is not a pattern of the rule")
    window = w.symbols[pos:pos + ell]
    if window not in rule.patterns or window == target:
        return None
    return Word(w.symbols[:pos] + target + w.symbols[pos + ell:], w.q)


@dataclass(frozen=True)
class DeltaTable:
    """Index shifts for rewriting the window at each position.

    ``shifts[i, c]`` is the index change produced by replacing window code
    ``c`` at position ``i`` by its canonical pattern (zero when ``c`` is in no
    class or already canonical).  ``target[c]`` is the canonical code, or -1.
    ``group[c]`` labels the class of ``c`` (-1 for none), so that arbitrary
    in-class targets can be reached through :meth:`shift`.
    """

    L: int
    q: int
    window_len: int
    shifts: np.ndarray
    target: np.ndarray
    group: np.ndarray

    @property
    def n_positions(self) -> int:
        return self.L - self.window_len + 1

    def place(self, i: int) -> int:
        return self.q ** (self.L - self.window_len - i)

    def shift(self, i: int, code: int, target_code: int) -> int:
        """Index shift for an arbitrary in-class replacement."""
        if self.group[code] < 0 or self.group[code] != self.group[target_code]:
            raise ValueError("codes are not in a common class")
        return (target_code - code) * self.place(i)


def build_delta_table(rules: Sequence[RewriteRule], L: int, q: int) -> DeltaTable:
    """Precompute canonical-rewrite index shifts for every position and window.

    >>> cyc = RewriteRule.from_strings(["012", "120", "201"], 3)
    >>> t = build_delta_table([cyc], 3, 3)
    >>> int(t.shifts[0, pattern_code((1, 2, 0), 3)])
    -10
    """
    if not rules:
        raise ValueError("at least one rule is required")
    ell = rules[0].window_len
    if any(r.window_len != ell for r in rules):
        raise ValueError("all rules must share one window length")
    if ell > L:
        raise ValueError(f"window length {ell} exceeds L={L}")
    ncode = q**ell
    target = np.full(ncode, -1, dtype=np.int64)
    group = np.full(ncode, -1, dtype=np.int64)
    for g, rule in enumerate(rules):
        codes = rule.codes
        for c in codes:
            if group[c] >= 0:
                raise ValueError("a pattern belongs to more than one rule")
            group[c] = g
            target[c] = codes[0]
    npos = L - ell + 1
    places = q ** np.arange(L - ell, -1, -1, dtype=np.int64)[:npos]
    diff = np.where(target >= 0, target - np.arange(ncode), 0)
    shifts = places[:, None] * diff[None, :]
    return DeltaTable(L, q, ell, shifts, target, group)


@dataclass(frozen=True)
class NormalForm:
    """Result of deleting class windows: per-class counts and the reduced word."""

    counts: tuple[int, ...]
    remainder: tuple[int, ...]

    @property
    def k(self) -> int:
        return sum(self.counts)

    def remainder_string(self) -> str:
        return "".join(str(s) for s in self.remainder)


def _delete_leftmost(symbols: list[int], patterns: set[tuple[int, ...]], ell: int) -> bool:
    for pos in range(len(symbols) - ell + 1):
        if tuple(symbols[pos:pos + ell]) in patterns:
            del symbols[pos:pos + ell]
            return True
    return False


def normal_form(w: Word | Sequence[int], rules: Sequence[RewriteRule]) -> NormalForm:
    """Reduce a word by deleting class windows, leftmost first.

    Every class element is assumed central in the semigroup, so a deleted
    window is factored out as a power of that element.  Classes are exhausted
    in the given order and the sweep repeats until nothing is reducible,
    which gives ``X^{m_X} Y^{m_Y} w'`` for the cyclic model.

    >>> flip = RewriteRule.from_strings(["000", "111"], 2)
    >>> normal_form(Word.from_string("0011100", 2), [flip]).remainder
    (0,)
    >>> normal_form(Word.from_string("0000", 2), [flip])
    NormalForm(counts=(1,), remainder=(0,))
    """
    symbols = list(w.symbols if isinstance(w, Word) else w)
    counts = [0] * len(rules)
    pattern_sets = [set(r.patterns) for r in rules]
    changed = True
    while changed:
        changed = False
        for g, rule in enumerate(rules):
            while _delete_leftmost(symbols, pattern_sets[g], rule.window_len):
                counts[g] += 1
                changed = True
    return NormalForm(tuple(counts), tuple(symbols))
