"""Classical Krylov sectors by union-find over all ``q**L`` words.

Each local rewrite is applied as an integer shift of the word index (see
:func:`fragmenta.words.build_delta_table`), so the sweep never decodes a
word.  Roots are canonicalized to the smallest index in the component.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numba
import numpy as np

from .models import ModelSpec
from .words import NormalForm, Word, build_delta_table, decode_index, normal_form

MAX_STATES = 20_000_000


class CapacityError(MemoryError):
    """The state space does not fit the enumeration budget."""


@numba.njit(cache=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@numba.njit(cache=True)
def _union_sweep(n_states, places, ncode, ptr, diffs):
    """Union every word with every word one local move away.

    ``places[t]`` is the index weight of window ``t``; the moves out of
    window code ``c`` are the code differences ``diffs[ptr[c]:ptr[c+1]]``.
    """
    parent = np.arange(n_states, dtype=np.int64)
    rank = np.zeros(n_states, dtype=np.int8)
    for m in range(n_states):
        for t in range(places.shape[0]):
            c = (m // places[t]) % ncode
            for e in range(ptr[c], ptr[c + 1]):
                other = m + diffs[e] * places[t]
                ra = _find(parent, m)
                rb = _find(parent, other)
                if ra == rb:
                    continue
                if rank[ra] < rank[rb]:
                    ra, rb = rb, ra
                parent[rb] = ra
                if rank[ra] == rank[rb]:
                    rank[ra] += 1
    return parent


@numba.njit(cache=True)
def _canonical_labels(parent):
    """Label words by sector, sectors numbered by their smallest member."""
    n = parent.shape[0]
    label = np.empty(n, dtype=np.int64)
    root_label = np.full(n, -1, dtype=np.int64)
    count = 0
    for m in range(n):
        r = _find(parent, m)
        if root_label[r] < 0:
            root_label[r] = count
            count += 1
        label[m] = root_label[r]
    return label, count


def _move_table(model: ModelSpec, L: int) -> tuple[np.ndarray, int, np.ndarray, np.ndarray]:
    """Window places plus CSR list of code differences for every local move."""
    q = model.q
    if model.variant in ("breakdown", "east"):
        terms = model.local_terms(L)
        ell = terms[0].window_len
        ncode = q**ell
        moves: list[set[int]] = [set() for _ in range(ncode)]
        for term in terms:
            for row, col, _ in term.nonzeros():
                if row != col:
                    moves[col].add(row - col)
        starts = sorted({t.start for t in terms})
        places = np.array([q ** (L - ell - s) for s in starts], dtype=np.int64)
    else:
        table = build_delta_table(model.rules(), L, q)
        ncode = q**table.window_len
        moves = [set() for _ in range(ncode)]
        for c in range(ncode):
            if table.target[c] >= 0 and table.target[c] != c:
                moves[c].add(int(table.target[c]) - c)
        places = np.array([table.place(i) for i in range(table.n_positions)], dtype=np.int64)
    ptr = np.zeros(ncode + 1, dtype=np.int64)
    for c in range(ncode):
        ptr[c + 1] = ptr[c] + len(moves[c])
    diffs = np.array([d for c in range(ncode) for d in sorted(moves[c])], dtype=np.int64)
    return places, ncode, ptr, diffs


@dataclass(frozen=True)
class CyclicInvariants:
    """Digit counts, ordered-pair count and the conserved combination ``D``."""

    N0: int
    N1: int
    N2: int
    N_ord: int

    @property
    def D(self) -> int:
        return self.N0 * self.N1 + self.N1 * self.N2 + self.N2 * self.N0 - 2 * self.N_ord

    def key(self) -> tuple[int, int, int, int]:
        return (self.N0, self.N1, self.N2, self.D)

    def to_dict(self) -> dict:
        return {"N0": self.N0, "N1": self.N1, "N2": self.N2, "N_ord": self.N_ord, "D": self.D}


def cyclic_invariants(w: Word) -> CyclicInvariants:
    """Conserved data of the cyclic qutrit dynamics.

    >>> cyclic_invariants(Word.from_string("012", 3)).D
    -1
    >>> cyclic_invariants(Word.from_string("021", 3)).D
    1
    """
    if w.q != 3:
        raise ValueError("cyclic invariants need q=3")
    seen = [0, 0, 0]
    n_ord = 0
    for s in w.symbols:
        # pairs (i<j) with (w_i, w_j) in {(0,1), (1,2), (2,0)}
        n_ord += seen[(s - 1) % 3]
        seen[s] += 1
    return CyclicInvariants(seen[0], seen[1], seen[2], n_ord)


@dataclass(frozen=True)
class SectorRecord:
    sector_id: int
    rep: int
    size: int
    frozen: bool
    k: int | None
    counts: tuple[int, ...] | None
    remainder: str | None
    invariants: CyclicInvariants | None

    def to_dict(self, L: int, q: int) -> dict:
        out = {
            "rep": str(decode_index(self.rep, L, q)),
            "index": self.rep,
            "size": self.size,
            "frozen": self.frozen,
            "k": self.k,
            "remainder": self.remainder,
            "invariants": self.invariants.to_dict() if self.invariants else None,
        }
        if self.counts is not None and len(self.counts) > 1:
            out["counts"] = list(self.counts)
        return out


class SectorCatalog:
    """Partition of all words into classical Krylov sectors.

    Attributes
    ----------
    labels : ndarray
        Sector id of every word index.
    reps, sizes : ndarray
        Smallest member index and size of each sector (sector ids are
        ordered by representative).
    """

    def __init__(self, model: ModelSpec, L: int, labels: np.ndarray, n_sectors: int):
        self.model_spec = model
        self.model = model.name
        self.L = L
        self.q = model.q
        self.labels = labels
        self.n_sectors = n_sectors
        self.sizes = np.bincount(labels, minlength=n_sectors)
        reps = np.full(n_sectors, -1, dtype=np.int64)
        # the first occurrence of each label is the minimum index
        uniq, first = np.unique(labels, return_index=True)
        reps[uniq] = first
        self.reps = reps

    @cached_property
    def _order(self) -> tuple[np.ndarray, np.ndarray]:
        order = np.argsort(self.labels, kind="stable")
        starts = np.concatenate([[0], np.cumsum(self.sizes)])
        return order, starts

    def members(self, sector_id: int) -> np.ndarray:
        """Ascending word indices of a sector."""
        if not 0 <= sector_id < self.n_sectors:
            raise KeyError(f"unknown sector id {sector_id}")
        order, starts = self._order
        return order[starts[sector_id]:starts[sector_id + 1]].astype(np.int64)

    def sector_of(self, word: Word | int | str) -> int:
        if isinstance(word, str):
            word = Word.from_string(word, self.q)
        idx = word.index if isinstance(word, Word) else int(word)
        return int(self.labels[idx])

    def histogram(self) -> dict[int, int]:
        sizes, counts = np.unique(self.sizes, return_counts=True)
        return {int(s): int(c) for s, c in zip(sizes, counts)}

    def mobile(self) -> np.ndarray:
        return np.nonzero(self.sizes > 1)[0]

    def largest(self) -> int:
        return int(np.argmax(self.sizes))

    def normal_form(self, sector_id: int) -> NormalForm | None:
        if self.model in ("breakdown", "east"):
            return None
        rep = decode_index(int(self.reps[sector_id]), self.L, self.q)
        return normal_form(rep, self.model_spec.rules())

    def record(self, sector_id: int) -> SectorRecord:
        nf = self.normal_form(sector_id)
        rep = int(self.reps[sector_id])
        inv = cyclic_invariants(decode_index(rep, self.L, 3)) if self.model == "cyclic" else None
        return SectorRecord(
            sector_id=sector_id,
            rep=rep,
            size=int(self.sizes[sector_id]),
            frozen=bool(self.sizes[sector_id] == 1),
            k=nf.k if nf else None,
            counts=nf.counts if nf else None,
            remainder=nf.remainder_string() if nf else None,
            invariants=inv,
        )

    def records(self) -> list[SectorRecord]:
        return [self.record(s) for s in range(self.n_sectors)]

    def to_dict(self, include_sectors: bool = True) -> dict:
        out = {
            "model": self.model,
            "L": self.L,
            "q": self.q,
            "histogram": [[s, c] for s, c in sorted(self.histogram().items())],
        }
        if include_sectors:
            out["sectors"] = [r.to_dict(self.L, self.q) for r in self.records()]
        return out


def enumerate_sectors(model: ModelSpec, L: int, max_states: int = MAX_STATES) -> SectorCatalog:
    """Union-find enumeration of the classical sectors of ``model`` on ``L`` sites.

    >>> from fragmenta.models import ghz
    >>> enumerate_sectors(ghz(), 6).histogram()
    {1: 26, 5: 6, 8: 1}
    """
    n_states = model.q**L
    if n_states > max_states:
        raise CapacityError(f"{model.q}**{L} = {n_states} states exceeds the budget of {max_states}")
    if L < model.window_len:
        labels = np.arange(n_states, dtype=np.int64)
        return SectorCatalog(model, L, labels, n_states)
    places, ncode, ptr, diffs = _move_table(model, L)
    parent = _union_sweep(n_states, places, ncode, ptr, diffs)
    labels, count = _canonical_labels(parent)
    return SectorCatalog(model, L, labels, int(count))


def sector_members(catalog: SectorCatalog, sector_id: int) -> np.ndarray:
    return catalog.members(sector_id)


def frozen_count(model: ModelSpec | str, L: int, q: int = 2) -> int:
    """Number of frozen words from the integer recurrences.

    Triplet flip: ``d_{L+2} = (q-1)(d_{L+1} + d_L)``, ``d_1 = q``, ``d_2 = q**2``.
    Cyclic: ``d_{L+1} = 2 d_L + d_{L-1}``, ``d_1 = 3``, ``d_2 = 9``.
    Temperley-Lieb: words without equal neighbours, ``3 * 2**(L-1)``.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    if isinstance(model, ModelSpec):
        name, q = model.name, model.q
    else:
        name = model
    if name in ("asymmetric", "ghz", "triplet"):
        d = [q, q * q]
        while len(d) < L:
            d.append((q - 1) * (d[-1] + d[-2]))
        return d[L - 1]
    if name == "cyclic":
        d = [3, 9]
        while len(d) < L:
            d.append(2 * d[-1] + d[-2])
        return d[L - 1]
    if name == "tl":
        return 3 * 2 ** (L - 1)
    raise ValueError(f"no frozen-count recurrence for {name}")


def iom_label(w: Word, alphas: tuple[int, ...], p: int) -> complex:
    """``sum_{j_1 < ... < j_k} exp(2 pi i / p * sum j_n) prod n^{alpha_n}_{j_n}`` on a product state.

    Sites are numbered from 1.

    >>> iom_label(Word.from_string("1111", 2), (1,), 1)
    (4+0j)
    """
    if max(alphas) >= w.q:
        raise ValueError("pattern digit outside the alphabet")
    k = len(alphas)
    # dp[n] = sum over placements of the first n pattern digits
    dp = [1.0 + 0j] + [0j] * k
    for j, s in enumerate(w.symbols, start=1):
        phase = np.exp(2j * np.pi * j / p)
        for n in range(k, 0, -1):
            if alphas[n - 1] == s:
                dp[n] += dp[n - 1] * phase
    z = np.round(dp[k], 12)
    # adding 0.0 clears negative zeros
    return complex(z.real + 0.0, z.imag + 0.0)
