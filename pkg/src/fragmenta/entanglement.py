"""Exact EFS entanglement through boundary labels in Z3 * Z3.

A binary word reduces (by deleting ``000`` and ``111``) to an element of the
free product of two cyclic groups of order three.  For the Ind-map EFS of a
triplet-flip sector with full label ``c_f``, cutting after ``L_A`` sites
gives one Schmidt component per left label ``c_A``, with weight

    p(c_A) = D_{c_A}(L_A) D_{c_A^{-1} c_f}(L - L_A) / D_{c_f}(L),

where ``D_c(l)`` counts (with weight ``gamma^{2/3 N_1}``) the length-``l``
words reducing to ``c``.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numba
import numpy as np

from .combinatorics import dk_closed


# ------------------------------------------------------------ group words

@dataclass(frozen=True)
class GroupElement:
    """Reduced binary word (no ``000`` / ``111``); the empty word is the identity."""

    word: str = ""

    def __post_init__(self) -> None:
        if any(c not in "01" for c in self.word):
            raise ValueError(f"{self.word!r} is not binary")
        if "000" in self.word or "111" in self.word:
            raise ValueError(f"{self.word!r} is not reduced")

    @property
    def depth(self) -> int:
        return len(self.word)

    def blocks(self) -> list[tuple[str, int]]:
        """Maximal runs ``(letter, length)``; lengths are 1 or 2."""
        out: list[tuple[str, int]] = []
        for ch in self.word:
            if out and out[-1][0] == ch:
                out[-1] = (ch, out[-1][1] + 1)
            else:
                out.append((ch, 1))
        return out

    def inverse(self) -> "GroupElement":
        return inverse(self)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return reduce(self.word + other.word)

    def __str__(self) -> str:
        return self.word or "e"


IDENTITY = GroupElement("")


def reduce(w: str | Sequence[int]) -> GroupElement:
    """Delete ``000``/``111`` until none remain (stack form; the result is order independent).

    >>> str(reduce("0011100"))
    '0'
    >>> str(reduce("000000"))
    'e'
    """
    stack: list[str] = []
    for ch in (w if isinstance(w, str) else "".join(str(int(x)) for x in w)):
        if len(stack) >= 2 and stack[-1] == ch and stack[-2] == ch:
            del stack[-2:]
        else:
            stack.append(ch)
    return GroupElement("".join(stack))


def inverse(g: GroupElement) -> GroupElement:
    """Reverse the blocks and replace each block length ``k`` by ``3 - k``.

    >>> str(inverse(GroupElement("011")))
    '100'
    """
    return GroupElement("".join(ch * (3 - k) for ch, k in reversed(g.blocks())))


def parse_element(text: str) -> GroupElement:
    return IDENTITY if text in ("", "e") else GroupElement(text)


@numba.njit(cache=True)
def _reduce_many(indices, L):
    n = indices.shape[0]
    lengths = np.empty(n, dtype=np.int64)
    values = np.empty(n, dtype=np.int64)
    for k in range(n):
        w = indices[k]
        depth = 0
        val = 0
        for pos in range(L - 1, -1, -1):
            x = (w >> pos) & 1
            if depth >= 2 and (val & 1) == x and ((val >> 1) & 1) == x:
                val >>= 2
                depth -= 2
            else:
                val = (val << 1) | x
                depth += 1
        lengths[k] = depth
        values[k] = val
    return lengths, values


def reduce_indices(indices: np.ndarray, L: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized reduction of binary word indices; returns ``(depth, value)`` arrays."""
    return _reduce_many(np.asarray(indices, dtype=np.int64), L)


@numba.njit(cache=True)
def _depth_profiles(indices, L):
    n = indices.shape[0]
    out = np.zeros((n, L + 1), dtype=np.int64)
    for k in range(n):
        w = indices[k]
        depth = 0
        val = 0
        for t in range(L):
            x = (w >> (L - 1 - t)) & 1
            if depth >= 2 and (val & 1) == x and ((val >> 1) & 1) == x:
                val >>= 2
                depth -= 2
            else:
                val = (val << 1) | x
                depth += 1
            out[k, t + 1] = depth
    return out


# ------------------------------------------------------- weighted counts

def sector_weight_dp(ell: int, gamma: float = 1.0) -> dict[GroupElement, float | int]:
    """``D^gamma_c(ell)`` for every reachable label ``c``.

    Each appended ``1`` multiplies by ``gamma**(2/3)``; with ``gamma = 1`` the
    values are exact integers.
    """
    if ell < 0:
        raise ValueError("ell must be >= 0")
    exact = gamma == 1
    w1 = 1 if exact else float(gamma) ** (2.0 / 3.0)
    state: dict[tuple[int, int], float | int] = {(0, 0): 1}
    for _ in range(ell):
        nxt: dict[tuple[int, int], float | int] = defaultdict(int)
        for (d, v), wt in state.items():
            for x, fac in ((0, 1), (1, w1)):
                if d >= 2 and (v & 1) == x and ((v >> 1) & 1) == x:
                    key = (d - 2, v >> 2)
                else:
                    key = (d + 1, (v << 1) | x)
                nxt[key] += wt * fac
        state = nxt
    return {_element(d, v): wt for (d, v), wt in state.items()}


def _element(depth: int, value: int) -> GroupElement:
    return GroupElement(format(value, f"0{depth}b") if depth else "")


def depth_count(ell: int, depth: int) -> int:
    """Unweighted ``D_c(ell)`` for any ``c`` of the given depth (0 if unreachable)."""
    if depth > ell or (ell - depth) % 3:
        return 0
    return dk_closed(2, (ell - depth) // 3, ell)


# ----------------------------------------------------------- distributions

@dataclass(frozen=True)
class SchmidtDistribution:
    L: int
    L_A: int
    c_f: GroupElement
    gamma: float
    labels: tuple[GroupElement, ...]
    weights: tuple[float, ...]
    exact: tuple[Fraction, ...] | None

    def as_dict(self) -> dict[str, float]:
        return {str(c): w for c, w in zip(self.labels, self.weights)}


def schmidt_weights(L: int, L_A: int, c_f: GroupElement | str = IDENTITY, gamma: float = 1.0,
                    _tables: tuple[dict, dict, dict] | None = None) -> SchmidtDistribution:
    """Schmidt weights of the Ind-map EFS of sector ``(L, c_f)`` across the cut ``L_A``.

    >>> d = schmidt_weights(9, 4)
    >>> sorted(d.exact, reverse=True)[:2]
    [Fraction(6, 19), Fraction(6, 19)]
    """
    if isinstance(c_f, str):
        c_f = parse_element(c_f)
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if not 1 <= L_A < L:
        raise ValueError("cut must satisfy 1 <= L_A < L")
    if c_f.depth > L or (L - c_f.depth) % 3:
        raise ValueError(f"no words of length {L} reduce to {c_f}")
    if (L - c_f.depth) < 3:
        raise ValueError("frozen sector: the label admits a single word")
    left, right, full = _tables or (sector_weight_dp(L_A, gamma), sector_weight_dp(L - L_A, gamma),
                                     None)
    total = full[c_f] if full is not None else _full_weight(L, c_f, gamma)
    labels, raw = [], []
    for c_a, wa in left.items():
        wb = right.get(c_a.inverse() * c_f)
        if wb:
            labels.append(c_a)
            raw.append(wa * wb)
    order = sorted(range(len(labels)), key=lambda i: (labels[i].depth, labels[i].word))
    labels = [labels[i] for i in order]
    raw = [raw[i] for i in order]
    if gamma == 1:
        exact = tuple(Fraction(int(r), int(total)) for r in raw)
        if sum(exact) != 1:
            raise ArithmeticError("Schmidt weights do not sum to one")
        weights = tuple(float(x) for x in exact)
    else:
        exact = None
        weights = tuple(float(r / total) for r in raw)
    return SchmidtDistribution(L, L_A, c_f, gamma, tuple(labels), weights, exact)


def _full_weight(L: int, c_f: GroupElement, gamma: float) -> float | int:
    if gamma == 1:
        return depth_count(L, c_f.depth)
    return sector_weight_dp(L, gamma)[c_f]


def _shannon(p: np.ndarray, base: float) -> float:
    p = p[p > 0]
    return float(-(p * np.log(p)).sum() / np.log(base))


def _base(base: float | str) -> float:
    if base in ("e", "E", np.e):
        return float(np.e)
    return float(base)


def efs_entropy(L: int, L_A: int, c_f: GroupElement | str = IDENTITY, gamma: float = 1.0,
                base: float | str = 2) -> float:
    """Entanglement entropy of the Ind-map EFS (Shannon entropy of the Schmidt weights).

    >>> round(efs_entropy(9, 4), 3)
    2.563
    """
    dist = schmidt_weights(L, L_A, c_f, gamma)
    return _shannon(np.array(dist.weights), _base(base))


def entropy_chain_rule(dist: SchmidtDistribution, base: float | str = 2) -> tuple[float, float]:
    """``(H_radial, H_angular)``: entropy of the depth plus mean entropy of the label given its depth."""
    b = _base(base)
    w = np.array(dist.weights)
    depths = np.array([c.depth for c in dist.labels])
    radial = []
    angular = 0.0
    for d in np.unique(depths):
        sel = w[depths == d]
        pd = sel.sum()
        radial.append(pd)
        angular += pd * _shannon(sel / pd, b)
    return _shannon(np.array(radial), b), angular


def entropy_profile(L: int, c_f: GroupElement | str = IDENTITY, gamma: float = 1.0,
                    base: float | str = 2) -> list[tuple[int, float]]:
    """``(L_A, S)`` for every cut ``1..L-1``."""
    if isinstance(c_f, str):
        c_f = parse_element(c_f)
    tables = {ell: sector_weight_dp(ell, gamma) for ell in range(1, L)}
    full = sector_weight_dp(L, gamma) if gamma != 1 else None
    out = []
    for la in range(1, L):
        dist = schmidt_weights(L, la, c_f, gamma, _tables=(tables[la], tables[L - la], full))
        out.append((la, _shannon(np.array(dist.weights), _base(base))))
    return out


def svd_entropy(members: np.ndarray, amplitudes: np.ndarray, L: int, L_A: int, base: float | str = 2) -> float:
    """Entanglement entropy of a state on the ``2**L`` product basis, by dense SVD."""
    psi = np.zeros(2**L)
    psi[np.asarray(members)] = amplitudes
    psi /= np.linalg.norm(psi)
    s = np.linalg.svd(psi.reshape(2**L_A, 2 ** (L - L_A)), compute_uv=False)
    return _shannon(s**2, _base(base))


# ------------------------------------------------------------- scaling fits

@dataclass(frozen=True)
class SqrtFit:
    slope: float
    r2: float
    intercept_slope: float
    intercept: float


def fit_sqrt_scaling(points: Sequence[tuple[float, float]]) -> SqrtFit:
    """Least-squares ``S = slope * sqrt(L)`` through the origin, plus an affine fit for reference."""
    if len(points) < 4:
        raise ValueError("need at least four sizes")
    L = np.array([p[0] for p in points], dtype=float)
    S = np.array([p[1] for p in points], dtype=float)
    x = np.sqrt(L)
    slope = float(x @ S / (x @ x))
    ss_tot = float(((S - S.mean()) ** 2).sum())
    ss_res = float(((S - slope * x) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else 0.0)
    A = np.column_stack([x, np.ones_like(x)])
    (m, b), *_ = np.linalg.lstsq(A, S, rcond=None)
    return SqrtFit(slope, r2, float(m), float(b))


# ------------------------------------------------------------ bridge walks

@dataclass(frozen=True)
class BridgeSample:
    L: int
    c_f: GroupElement
    n_words: int
    profiles: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    sigma: float


def sector_words(L: int, c_f: GroupElement | str = IDENTITY) -> np.ndarray:
    """All binary words of length ``L`` reducing to ``c_f`` (ascending indices)."""
    if isinstance(c_f, str):
        c_f = parse_element(c_f)
    if L > 26:
        raise MemoryError("sector enumeration limited to L <= 26")
    target = int(c_f.word, 2) if c_f.word else 0
    out = []
    chunk = 1 << 22
    for start in range(0, 2**L, chunk):
        idx = np.arange(start, min(start + chunk, 2**L), dtype=np.int64)
        d, v = _reduce_many(idx, L)
        out.append(idx[(d == c_f.depth) & (v == target)])
    return np.concatenate(out)


def bridge_envelope(t: np.ndarray, L: int) -> np.ndarray:
    """Mean ``|B_t|`` of a unit Brownian bridge on ``[0, L]``: ``sqrt(2 t (L-t) / (pi L))``."""
    return np.sqrt(2 * t * (L - t) / (np.pi * L))


def sample_bridge_walks(L: int, c_f: GroupElement | str, n_samples: int,
                        rng: np.random.Generator, words: np.ndarray | None = None) -> BridgeSample:
    """Uniform samples from the sector and their depth profiles ``|reduce(w[:t])|``.

    The bridge scale ``sigma`` is fitted to the mean profile on
    ``t in [L/4, 3L/4]``.
    """
    if isinstance(c_f, str):
        c_f = parse_element(c_f)
    if words is None:
        words = sector_words(L, c_f)
    pick = words[rng.integers(0, len(words), size=n_samples)]
    prof = _depth_profiles(pick, L)
    mean = prof.mean(axis=0)
    std = prof.std(axis=0)
    t = np.arange(L + 1)
    sel = (t >= L / 4) & (t <= 3 * L / 4)
    f = bridge_envelope(t[sel], L)
    sigma = float(f @ mean[sel] / (f @ f))
    return BridgeSample(L, c_f, len(words), prof, mean, std, sigma)
