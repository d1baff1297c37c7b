"""Closed-form and recurrence counts used as oracles for the enumeration.

All counts are exact Python integers.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import mpmath


@dataclass(frozen=True)
class CountingTable:
    """One evaluated counting function: id, arguments and exact value."""

    function: str
    params: tuple[int, ...]
    value: int


@lru_cache(maxsize=None)
def fib(n: int) -> int:
    """Fibonacci numbers with ``F_1 = F_2 = 1``.

    >>> [fib(n) for n in (1, 5, 10)]
    [1, 5, 55]
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def dk_closed(q: int, k: int, L: int) -> int:
    """Size of a triplet-flip sector with ``k`` triplets on ``L`` sites.

    ``D_k(L) = (q-1)^k C(L,k) - (2q-3) sum_{j<k} (q-1)^j C(L,j)``

    >>> dk_closed(2, 2, 6), dk_closed(3, 1, 4)
    (8, 5)
    """
    if k < 0 or 3 * k > L:
        raise ValueError(f"need 0 <= 3k <= L, got k={k}, L={L}")
    return (q - 1) ** k * comb(L, k) - (2 * q - 3) * sum((q - 1) ** j * comb(L, j) for j in range(k))


def all_mobile_count(q: int, k: int) -> int:
    """Size of the all-mobile sector ``L = 3k``: ``(q/k) sum_{j<k} (q-1)^j (k-j) C(3k, j)``.

    >>> [all_mobile_count(2, k) for k in range(1, 5)]
    [2, 8, 38, 196]
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    num = q * sum((q - 1) ** j * (k - j) * comb(3 * k, j) for j in range(k))
    if num % k:
        raise ArithmeticError("non-integral all-mobile count")
    return num // k


def quantum_dim(k: int, L: int, q: int = 2) -> int:
    """``D^q_k(L) = D^cl_k(L) - 1``: one EFS per mobile triplet-flip sector."""
    if k < 1:
        raise ValueError("frozen sectors (k=0) have no mobile quantum part")
    return dk_closed(q, k, L) - 1


def ghz_charge_dims(L: int) -> tuple[int, int]:
    """``(dim X=+1, dim X=-1)`` of ``K_q`` in the GHZ all-mobile sector.

    >>> ghz_charge_dims(6), ghz_charge_dims(9)
    ((3, 4), (19, 18))
    """
    if L % 3:
        raise ValueError("charge split needs 3 | L")
    dq = quantum_dim(L // 3, L)
    s = (-1) ** (L // 3)
    return (dq - s) // 2, (dq + s) // 2


def tl_standard_dim(L: int, j: int) -> int:
    """Dimension of the standard module with ``j`` through-lines.

    >>> tl_standard_dim(4, 0), tl_standard_dim(6, 2)
    (2, 9)
    """
    if j < 0 or j > L or (L - j) % 2:
        raise ValueError(f"j={j} must satisfy 0 <= j <= L with j = L mod 2")
    a = (L - j) // 2
    return comb(L, a) - (comb(L, a - 1) if a >= 1 else 0)


def dk_recurrence_holds(q: int, k: int, L: int) -> bool:
    """Check ``D_k(L+1) = D_k(L) + (q-1) D_{k-1}(L)`` where all terms are defined."""
    return dk_closed(q, k, L + 1) == dk_closed(q, k, L) + (q - 1) * dk_closed(q, k - 1, L)


def frozen_recurrence(name: str, L: int, q: int = 2) -> int:
    """Frozen word counts from the integer recurrences."""
    from .classical import frozen_count

    return frozen_count(name, L, q)


def frozen_closed(name: str, L: int, q: int = 2) -> int:
    """Frozen word count from the closed forms, evaluated at high precision and rounded.

    Triplet flip: ``d_L = q/(2 sqrt(q-1)) [ (l+^L + l-^L)/sqrt(q-1) + (l+^L - l-^L)/sqrt(q+3) ]``
    with ``l+- = (q-1 +- sqrt((q+3)(q-1)))/2``.  Cyclic: ``d_L = 3/2 [(1+sqrt2)^L + (1-sqrt2)^L]``.
    The result is cross-checked against the integer recurrence.

    >>> frozen_closed("cyclic", 7)
    717
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    with mpmath.workdps(30 + L):
        if name in ("triplet", "asymmetric", "ghz"):
            r = mpmath.sqrt((q + 3) * (q - 1))
            lp, lm = (q - 1 + r) / 2, (q - 1 - r) / 2
            s = mpmath.sqrt(q - 1)
            val = q / (2 * s) * ((lp**L + lm**L) / s + (lp**L - lm**L) / mpmath.sqrt(q + 3))
        elif name == "cyclic":
            val = mpmath.mpf(3) / 2 * ((1 + mpmath.sqrt(2)) ** L + (1 - mpmath.sqrt(2)) ** L)
        else:
            raise ValueError(f"no closed form for {name}")
        out = int(mpmath.nint(val))
        if abs(val - out) > mpmath.mpf("1e-6"):
            raise ArithmeticError("closed form is not integral")
    if out != frozen_recurrence(name if name == "cyclic" else "triplet", L, q):
        raise ArithmeticError("closed form disagrees with the recurrence")
    return out


def frozen_totals(L: int) -> dict[str, int]:
    """Product, entangled and total frozen counts of the q=2 triplet-flip chain.

    ``2F_{L+1}``, ``F_L - 1`` and ``F_{L+3} - 1``.

    >>> frozen_totals(6)
    {'product': 26, 'entangled': 7, 'total': 33}
    """
    prod, ent = 2 * fib(L + 1), fib(L) - 1
    tot = fib(L + 3) - 1
    if prod + ent != tot:
        raise ArithmeticError("Fibonacci identity failed")
    return {"product": prod, "entangled": ent, "total": tot}


def non_degenerate_sector_count(k: int, L: int) -> int:
    """Number of q=2 triplet-flip sectors with ``k`` triplets: ``2F_{L+1-3k}`` (1 when ``L = 3k``)."""
    if 3 * k == L:
        return 1
    return 2 * fib(L + 1 - 3 * k)


COUNTERS = {
    "fib": lambda n: fib(n),
    "dk": dk_closed,
    "all_mobile": all_mobile_count,
    "quantum_dim": quantum_dim,
    "ghz_charge": ghz_charge_dims,
    "tl_dim": tl_standard_dim,
    "frozen": frozen_closed,
    "frozen_totals": frozen_totals,
}
