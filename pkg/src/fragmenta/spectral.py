"""Gap-ratio statistics over disorder and analytic GOE / mGOE / Poisson references.

The mixed-GOE curve follows the superposition argument for ``m`` independent
unfolded GOE spectra with intensities ``mu_i``.  Starting from the joint
density ``p2(s, t)`` of the two gaps around a level, the marginals are

* ``p1(s)   = int_0^inf p2(s, v) dv``
* ``f(s)    = int_s^inf p1``              (gap exceeds ``s``)
* ``g(s)    = int_s^inf (u - s) p1(u) du`` (no level in a window of length ``s`` seen from a generic point)
* ``h(s, t) = int_s^inf int_t^inf p2``

and ``H_m(x, y) = sum_i mu_i h(mu_i x, mu_i y) prod_{j != i} g(mu_j (x + y))``.
The two-gap density ``P_m = d_x d_y H_m`` is formed analytically from
``g' = -f``, ``g'' = p1``, ``d_s h = -K(s, t)``, ``d_t h = -K(t, s)`` and
``d_s d_t h = p2`` with ``K(s, t) = int_t^inf p2(s, v) dv`` in closed form.
Finally ``P_m(r) = 2 int_0^inf x P_m(x, r x) dx``.
"""
from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import integrate, special

from .io import derive_rng, thread_count

DEDUP_RTOL = 1e-10
DEFAULT_BINS = 50
DEFAULT_REALIZATIONS = 500

# exponent of the three-level GOE surmise (unit mean spacing)
A_EXP = 9.0 / (4.0 * np.pi)
# prefactor that normalizes p2 to unit mass
P2_NORMALIZED = 2187.0 / (32.0 * np.pi**3)
# prefactor as commonly printed next to the same exponent; integrates to ~0.487
P2_PRINTED = 27.0 / (8.0 * np.pi)

_GL_X, _GL_W = np.polynomial.legendre.leggauss(160)
_TAIL = 12.0  # p2 is below 1e-40 beyond this distance


# -------------------------------------------------------------- gap ratios

def gap_ratios(eigenvalues: Sequence[float], dedup_tol: float = DEDUP_RTOL) -> np.ndarray:
    """Ratios ``min(d_n, d_{n+1}) / max(d_n, d_{n+1})`` of consecutive distinct levels.

    Values closer than ``dedup_tol`` times the spectral span are merged first.

    >>> gap_ratios([0, 1, 2, 3]).tolist(), gap_ratios([0, 1, 3]).tolist()
    ([1.0, 1.0], [0.5])
    >>> gap_ratios([0, 0, 1, 2]).tolist()
    [1.0]
    """
    E = np.sort(np.asarray(eigenvalues, dtype=float))
    if E.size < 3:
        return np.zeros(0)
    span = E[-1] - E[0]
    if span <= 0:
        return np.zeros(0)
    keep = np.concatenate([[True], np.diff(E) > dedup_tol * span])
    E = E[keep]
    if E.size < 3:
        return np.zeros(0)
    d = np.diff(E)
    a, b = d[:-1], d[1:]
    return np.minimum(a, b) / np.maximum(a, b)


# ---------------------------------------------------- GOE surmise pieces

def goe_joint_density(s, t, normalized: bool = True):
    """Joint density of the left and right gaps of the 3x3 GOE surmise.

    ``p2(s,t) = C s t (s+t) exp[-(9/4pi)(s^2 + s t + t^2)]`` on ``s, t > 0``.
    ``normalized=True`` uses ``C = 2187/(32 pi^3)`` (unit mass, unit mean gap);
    ``normalized=False`` uses ``C = 27/(8 pi)``.
    """
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    C = P2_NORMALIZED if normalized else P2_PRINTED
    out = C * s * t * (s + t) * np.exp(-A_EXP * (s * s + s * t + t * t))
    return np.where((s > 0) & (t > 0), out, 0.0)


def p2(s, t):
    return goe_joint_density(s, t, True)


def K(s, t):
    """``int_t^inf p2(s, v) dv`` in closed form (``s >= 0``, ``t >= 0``)."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    a = A_EXP
    W = t + s / 2
    i0 = 0.5 * np.sqrt(np.pi / a) * special.erfc(np.sqrt(a) * W)
    i2 = W * np.exp(-a * W * W) / (2 * a) + i0 / (2 * a)
    return P2_NORMALIZED * s * np.exp(-0.75 * a * s * s) * (i2 - s * s / 4 * i0)


def p1(s):
    """One-gap marginal ``int_0^inf p2(s, v) dv``."""
    return K(s, 0.0)


def _tail_integral(fun, s, weight_power: int = 0):
    """``int_0^TAIL a^k fun(s + a) da`` by fixed Gauss-Legendre, vectorized over ``s``."""
    s = np.asarray(s, dtype=float)
    a = 0.5 * _TAIL * (_GL_X + 1.0)
    w = 0.5 * _TAIL * _GL_W
    vals = fun(s[..., None] + a)
    if weight_power:
        vals = vals * a**weight_power
    return vals @ w


def f(s):
    """Probability that a gap exceeds ``s``: ``int_s^inf p1``."""
    return _tail_integral(p1, s)


def g(s):
    """``int_s^inf (u - s) p1(u) du``; equals 1 at ``s = 0`` for unit mean gap."""
    return _tail_integral(p1, s, weight_power=1)


def h(s, t):
    """``int_s^inf int_t^inf p2 = int_s^inf K(u, t) du``."""
    s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
    a = 0.5 * _TAIL * (_GL_X + 1.0)
    w = 0.5 * _TAIL * _GL_W
    return K(s[..., None] + a, t[..., None]) @ w


# ------------------------------------------------------------- mixed GOE

def _intensities(m: int, intensities: Sequence[float] | None) -> np.ndarray:
    if m < 1:
        raise ValueError("m must be >= 1")
    if intensities is None:
        return np.full(m, 1.0 / m)
    mu = np.asarray(intensities, dtype=float)
    if mu.shape != (m,) or np.any(mu <= 0) or abs(mu.sum() - 1) > 1e-12:
        raise ValueError("intensities must be m positive numbers summing to 1")
    return mu


def mgoe_joint(x, y, mu: Sequence[float]):
    """Two-gap density ``P_m(x, y) = d_x d_y H_m(x, y)`` of the mixed spectrum."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    mu = np.asarray(mu, dtype=float)
    m = mu.size
    S = x + y
    gj = np.stack([g(mj * S) for mj in mu])
    fj = np.stack([f(mj * S) for mj in mu])
    pj = np.stack([p1(mj * S) for mj in mu])
    out = np.zeros(np.broadcast(x, y).shape)
    equal = np.allclose(mu, mu[0])
    # with equal intensities every term of the sum is the same
    for i in range(1 if equal else m):
        mi = mu[i]
        X, Y = mi * x, mi * y
        hv = h(X, Y)
        hs, ht = -K(X, Y), -K(Y, X)
        if equal:
            n = m - 1
            gi, fi, pi_ = gj[0], fj[0], pj[0]
            G = gi**n
            G1 = -n * mi * fi * gi ** max(n - 1, 0) if n >= 1 else 0.0
            G2 = (n * mi**2 * pi_ * gi ** max(n - 1, 0) if n >= 1 else 0.0) + \
                 (n * (n - 1) * mi**2 * fi**2 * gi ** max(n - 2, 0) if n >= 2 else 0.0)
        else:
            others = [j for j in range(m) if j != i]
            G = np.prod(gj[others], axis=0) if others else np.ones_like(S)
            G1 = np.zeros_like(S)
            G2 = np.zeros_like(S)
            for j in others:
                rest = [k for k in others if k != j]
                pr = np.prod(gj[rest], axis=0) if rest else 1.0
                G1 = G1 - mu[j] * fj[j] * pr
                G2 = G2 + mu[j] ** 2 * pj[j] * pr
                for k in rest:
                    rest2 = [l for l in rest if l != k]
                    pr2 = np.prod(gj[rest2], axis=0) if rest2 else 1.0
                    G2 = G2 + mu[j] * mu[k] * fj[j] * fj[k] * pr2
        out = out + mi * (mi**2 * p2(X, Y) * G + mi * (hs + ht) * G1 + hv * G2)
    return out * m if equal else out


def _ratio_integral(joint, r: np.ndarray, epsrel: float) -> np.ndarray:
    """``2 int_0^inf x P(x, r x) dx`` with ``x = u / (1 - u)``."""
    def integrand(u):
        if u >= 1.0:
            return np.zeros_like(r)
        x = u / (1.0 - u)
        jac = 1.0 / (1.0 - u) ** 2
        return 2.0 * x * joint(x, r * x) * jac

    val, _ = integrate.quad_vec(integrand, 0.0, 1.0, epsrel=epsrel, epsabs=1e-12, limit=400)
    return val


@dataclass(frozen=True)
class ReferenceCurve:
    """Tabulated ``P(r)`` on a fixed grid of ``[0, 1]``."""

    kind: str
    r: np.ndarray
    density: np.ndarray
    m: int | None = None
    intensities: tuple[float, ...] | None = None
    _cdf: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        c = integrate.cumulative_simpson(self.density, x=self.r, initial=0.0)
        object.__setattr__(self, "_cdf", c)

    def integral(self) -> float:
        return float(integrate.simpson(self.density, x=self.r))

    def mean(self) -> float:
        return float(integrate.simpson(self.r * self.density, x=self.r))

    def cdf(self, x) -> np.ndarray:
        return np.interp(x, self.r, self._cdf / self._cdf[-1])

    def at(self, x) -> np.ndarray:
        return np.interp(x, self.r, self.density)

    @property
    def label(self) -> str:
        if self.kind == "mGOE":
            return "goe" if self.m == 1 else f"{self.m}goe"
        return self.kind.lower()


def default_grid(n: int = 401) -> np.ndarray:
    if n < 3 or n % 2 == 0:
        raise ValueError("grid size must be odd and >= 3")
    return np.linspace(0.0, 1.0, n)


@lru_cache(maxsize=32)
def _mgoe_cached(m: int, mu: tuple[float, ...], n: int, epsrel: float) -> tuple[np.ndarray, np.ndarray]:
    r = default_grid(n)
    dens = _ratio_integral(lambda x, y: mgoe_joint(x, y, mu), r, epsrel)
    return r, dens


def mgoe_pr(m: int, intensities: Sequence[float] | None = None, n_grid: int = 401,
            epsrel: float = 1e-8) -> ReferenceCurve:
    """Gap-ratio density of ``m`` superposed GOE spectra with the given intensities."""
    mu = tuple(float(v) for v in _intensities(m, intensities))
    r, dens = _mgoe_cached(m, mu, n_grid, epsrel)
    return ReferenceCurve("mGOE", r.copy(), dens.copy(), m, mu)


def goe_pr(n_grid: int = 401) -> ReferenceCurve:
    return mgoe_pr(1, n_grid=n_grid)


def goe_surmise(r):
    """Closed-form 3x3 GOE ratio density ``(27/4)(r + r^2)/(1 + r + r^2)^{5/2}`` folded to ``[0, 1]``."""
    r = np.asarray(r, dtype=float)
    return 2 * (27.0 / 8.0) * (r + r * r) / (1 + r + r * r) ** 2.5


def poisson_pr(n_grid: int = 401) -> ReferenceCurve:
    """Ratio density for uncorrelated levels, ``2 / (1 + r)^2`` on ``[0, 1]``."""
    r = default_grid(n_grid)
    return ReferenceCurve("Poisson", r, 2.0 / (1.0 + r) ** 2)


def reference_set(n_grid: int = 401) -> dict[str, ReferenceCurve]:
    return {"goe": mgoe_pr(1, n_grid=n_grid), "2goe": mgoe_pr(2, n_grid=n_grid),
            "3goe": mgoe_pr(3, n_grid=n_grid), "poisson": poisson_pr(n_grid)}


# ------------------------------------------------------ Monte-Carlo oracles

def mc_goe_ratios(n: int, rng: np.random.Generator) -> np.ndarray:
    """Ratios from ``n`` independent 3x3 GOE matrices (exact surmise ensemble)."""
    A = rng.standard_normal((n, 3, 3))
    M = (A + np.swapaxes(A, 1, 2)) / 2
    e = np.linalg.eigvalsh(M)
    d1, d2 = e[:, 1] - e[:, 0], e[:, 2] - e[:, 1]
    return np.minimum(d1, d2) / np.maximum(d1, d2)


def mc_poisson_ratios(n_spacings: int, rng: np.random.Generator) -> np.ndarray:
    """Ratios of consecutive independent exponential spacings."""
    d = rng.exponential(size=n_spacings)
    return np.minimum(d[:-1], d[1:]) / np.maximum(d[:-1], d[1:])


def mc_mgoe_ratios(m: int, n_spectra: int, rng: np.random.Generator, N: int = 200,
                   intensities: Sequence[float] | None = None) -> np.ndarray:
    """Ratios of superposed, independently unfolded large-GOE spectra.

    Each block is unfolded with the semicircle counting function, the central
    half of the levels is kept, and block ``i`` is rescaled to density ``mu_i``.
    """
    mu = _intensities(m, intensities)
    out = []
    for _ in range(n_spectra):
        levels = []
        for i in range(m):
            A = rng.standard_normal((N, N))
            # semicircle of radius 2 after this scaling
            e = np.linalg.eigvalsh((A + A.T) / np.sqrt(2)) / np.sqrt(N)
            x = np.clip(e / 2.0, -1, 1)
            # integrated semicircle density scaled to N levels
            unf = N * (0.5 + (x * np.sqrt(1 - x * x) + np.arcsin(x)) / np.pi)
            keep = (unf > N / 4) & (unf < 3 * N / 4)
            levels.append(unf[keep] / mu[i])
        # common window where every block is present
        lo = max(v.min() for v in levels)
        hi = min(v.max() for v in levels)
        E = np.sort(np.concatenate([v[(v >= lo) & (v <= hi)] for v in levels]))
        out.append(gap_ratios(E, dedup_tol=0.0))
    return np.concatenate(out)


# -------------------------------------------------------- KS and samples

def ks_distance(samples: np.ndarray, curve: ReferenceCurve) -> float:
    """Kolmogorov-Smirnov distance between an empirical sample and a reference curve."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        return float("nan")
    F = curve.cdf(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


@dataclass
class GapRatioSample:
    """Gap ratios collected over disorder realizations of one sector."""

    model: str
    L: int
    sector: str
    n_realizations: int
    dedup_tol: float
    r: np.ndarray
    per_realization: list[int] = field(default_factory=list)
    levels: list[int] = field(default_factory=list)

    def histogram(self, bins: int = DEFAULT_BINS) -> tuple[np.ndarray, np.ndarray]:
        dens, edges = np.histogram(self.r, bins=bins, range=(0.0, 1.0), density=True)
        return 0.5 * (edges[1:] + edges[:-1]), dens

    def ks(self, refs: dict[str, ReferenceCurve] | None = None) -> dict[str, float]:
        refs = refs or reference_set()
        return {k: ks_distance(self.r, c) for k, c in refs.items()}

    def summary(self, refs: dict[str, ReferenceCurve] | None = None) -> dict:
        ks = self.ks(refs)
        return {"model": self.model, "L": self.L, "sector": self.sector,
                "n_realizations": self.n_realizations, "dedup_tol": self.dedup_tol,
                "n_ratios": int(self.r.size), "mean_r": float(np.mean(self.r)) if self.r.size else None,
                "levels_per_realization": sorted(set(self.levels)),
                "ks": ks, "best": min(ks, key=ks.get)}


@dataclass
class SpectralProblem:
    """Fixed projected terms whose random sums are diagonalized.

    ``blocks`` holds one list of Hermitian terms per invariant block; the
    spectrum of a realization is the union of the block spectra.  For
    ``kind="tl-modules"`` the blocks are TL standard-module generators
    (not symmetric in the link basis, real spectrum).
    """

    model: str
    L: int
    sector: str
    blocks: list[list[np.ndarray]]
    coupling: object
    kind: str = "hermitian"
    note: str = ""

    @property
    def dims(self) -> list[int]:
        return [b[0].shape[0] if b else 0 for b in self.blocks]

    def spectrum(self, rng: np.random.Generator) -> np.ndarray:
        n_terms = len(self.blocks[0])
        J = self.coupling.draw(rng, n_terms)
        vals = []
        for terms in self.blocks:
            if not terms or terms[0].shape[0] == 0:
                continue
            H = sum(j * t for j, t in zip(J, terms))
            if self.kind == "tl-modules":
                ev = np.linalg.eigvals(H / 3.0)
                if np.max(np.abs(ev.imag)) > 1e-8 * max(1.0, np.max(np.abs(ev.real))):
                    raise ArithmeticError("complex eigenvalues on a standard module")
                vals.append(ev.real)
            else:
                vals.append(np.linalg.eigvalsh(H))
        return np.sort(np.concatenate(vals))


def _resolve_sector(cat, sector):
    if sector is None:
        return cat.largest()
    if isinstance(sector, str):
        return cat.sector_of(sector)
    return int(sector)


def sector_problem(model, L: int, sector: int | str | None = None, charge: int | None = None,
                   symmetry: tuple[Sequence[int], int] | None = None) -> SpectralProblem:
    """Project the local terms of a classical sector onto ``K_q`` (optionally one charge).

    ``sector`` is a sector id, a representative word, or ``None`` for the largest
    sector.  ``symmetry=(digit_perm, order)`` together with ``charge`` keeps a
    single eigenspace of that on-site relabelling.
    """
    from .classical import enumerate_sectors
    from .linalg import project_out
    from .models import digit_permutation, sector_terms
    from .quantum import charge_resolve, compute_efs
    from .words import decode_index

    cat = enumerate_sectors(model, L)
    sid = _resolve_sector(cat, sector)
    members = cat.members(sid)
    terms = sector_terms(model, members, L)
    efs = compute_efs(terms, psd=model.psd)
    kq = project_out(np.eye(len(members)), efs).basis
    label = str(decode_index(int(members[0]), L, model.q))
    if charge is not None:
        if symmetry is None:
            raise ValueError("charge resolution needs a symmetry")
        perm, order = symmetry
        S = digit_permutation(perm, members, L, model.q)
        kq = dict(charge_resolve(kq, S, order))[charge].basis
        label += f"/charge{charge}"
    proj = [kq.conj().T @ t @ kq for t in terms]
    if np.iscomplexobj(kq):
        proj = [(p + p.conj().T) / 2 for p in proj]
    return SpectralProblem(model.name, L, label, [proj], model.coupling)


def charge_bases(members: np.ndarray, L: int, q: int, perm: Sequence[int], order: int):
    """Sparse orthonormal eigenbases of a cyclic on-site relabelling, one per charge.

    Built orbit by orbit: an orbit of size ``s`` contributes the vector
    ``s^{-1/2} sum_k w^{-c k} X^k |w>`` to every charge ``c`` with ``c s = 0 mod order``.
    """
    from scipy.sparse import csc_matrix

    from .models import digit_permutation_indices

    pos = digit_permutation_indices(perm, members, L, q)
    D = len(members)
    seen = np.zeros(D, dtype=bool)
    cols = {c: ([], [], []) for c in range(order)}  # rows, col ids, values
    count = dict.fromkeys(range(order), 0)
    for n in range(D):
        if seen[n]:
            continue
        orbit = [n]
        seen[n] = True
        while (nxt := pos[orbit[-1]]) != n:
            orbit.append(int(nxt))
            seen[nxt] = True
        s = len(orbit)
        if order % s:
            raise ValueError("orbit size does not divide the symmetry order")
        for c in range(order):
            if (c * s) % order:
                continue
            phase = np.exp(-2j * np.pi * c * np.arange(s) / order) / np.sqrt(s)
            r, k, v = cols[c]
            r.extend(orbit)
            k.extend([count[c]] * s)
            v.extend(phase)
            count[c] += 1
    out = {}
    for c in range(order):
        r, k, v = cols[c]
        v = np.asarray(v)
        if c == 0 or (2 * c == order):
            v = v.real
        out[c] = csc_matrix((v, (r, k)), shape=(D, count[c]))
    return out


def charge_block_problem(model, L: int, sector: int | str | None, perm: Sequence[int], order: int,
                         rel_tol: float = 1e-10) -> SpectralProblem:
    """Unresolved ``K_q`` spectrum assembled from charge blocks of an on-site symmetry.

    The sector is split into charge sectors of the relabelling (sparse, exact),
    the EFS is removed inside each, and the union of the block spectra equals
    the spectrum of ``H`` on the whole ``K_q``.  With real terms and real
    couplings the charge ``-c`` block is the complex conjugate of charge ``c``
    in the conjugate basis, so its spectrum is identical; only one of each
    conjugate pair is diagonalized.
    """
    from .classical import enumerate_sectors
    from .linalg import null_space, project_out
    from .models import sector_terms
    from .words import decode_index

    cat = enumerate_sectors(model, L)
    sid = _resolve_sector(cat, sector)
    members = cat.members(sid)
    terms = sector_terms(model, members, L, sparse=True)
    if any(np.iscomplexobj(t.data) for t in terms):
        raise ValueError("conjugate-pair reduction needs real local terms")
    bases = charge_bases(members, L, model.q, perm, order)
    blocks, dims = [], {}
    for c in range(order):
        if 0 < order - c < c:
            dims[c] = dims[order - c]
            continue
        V = bases[c]
        local = [(V.conj().T @ t @ V).toarray() for t in terms]
        efs = null_space(sum(local), rel_tol=rel_tol, psd=model.psd)
        Q = project_out(np.eye(V.shape[1]), efs).basis
        proj = [Q.conj().T @ a @ Q for a in local]
        proj = [(p + p.conj().T) / 2 for p in proj]
        if np.iscomplexobj(proj[0]) and max(np.max(np.abs(p.imag)) for p in proj) == 0:
            proj = [p.real for p in proj]
        blocks.append(proj)
        dims[c] = (V.shape[1], efs.dim, Q.shape[1])
    label = str(decode_index(int(members[0]), L, model.q))
    note = "charge blocks (dim, efs, kq): " + ", ".join(f"{c}:{dims[c]}" for c in range(order))
    return SpectralProblem(model.name, L, label, blocks, model.coupling, note=note)


def tl_module_problem(model, L: int) -> SpectralProblem:
    """TL spectra through the standard modules with fewer than ``L`` through-lines.

    The distinct ``K_q`` spectrum of the largest TL sector is the union of the
    Hamiltonian spectra on these modules (checked against direct projection at
    small ``L`` in the tests).
    """
    from .models import tl_module_generators

    mods = [tl_module_generators(L, j) for j in range(L % 2, L, 2)]
    return SpectralProblem(model.name, L, "largest/standard-modules", mods, model.coupling,
                           kind="tl-modules")


def collect_ratios(problem: SpectralProblem, n_real: int, seed: int, sector_key: int = 0,
                   dedup_tol: float = DEDUP_RTOL, threads: int | None = None) -> GapRatioSample:
    """Gap ratios of ``n_real`` disorder realizations; realization ``k`` uses its own seeded stream."""
    if n_real < 1:
        raise ValueError("need at least one realization")

    def one(k: int) -> tuple[np.ndarray, int]:
        E = problem.spectrum(derive_rng(seed, "spectra", sector_key, k))
        r = gap_ratios(E, dedup_tol)
        return r, r.size + 2

    workers = threads or thread_count()
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            res = list(ex.map(one, range(n_real)))
    else:
        res = [one(k) for k in range(n_real)]
    levels = [n for _, n in res]
    if max(levels) < 10:
        warnings.warn("sector has fewer than 10 distinct levels; no statistics collected")
        r = np.zeros(0)
    else:
        r = np.concatenate([x for x, _ in res])
    return GapRatioSample(problem.model, problem.L, problem.sector, n_real, dedup_tol, r,
                          [x.size for x, _ in res], levels)


ROUTES = ("auto", "dense", "charge-blocks", "tl-modules")


def build_problem(model, L: int, sector: int | str | None = None, route: str = "auto", **kw) -> SpectralProblem:
    """Choose how ``H`` on ``K_q`` is diagonalized.

    ``auto``: TL largest sector through standard modules, cyclic sectors through
    ``Z3`` charge blocks (falling back to dense projection when the sector is
    not shift invariant), everything else by dense projection.
    """
    if route not in ROUTES:
        raise ValueError(f"route must be one of {ROUTES}")
    if route == "auto":
        if model.variant == "tl" and sector is None:
            route = "tl-modules"
        elif model.variant == "cyclic":
            try:
                return charge_block_problem(model, L, sector, (1, 2, 0), 3)
            except ValueError:
                route = "dense"
        else:
            route = "dense"
    if route == "tl-modules":
        if sector is not None:
            raise ValueError("the standard-module route covers the largest TL sector only")
        return tl_module_problem(model, L)
    if route == "charge-blocks":
        perm, order = kw.pop("symmetry", ((1, 2, 0), 3) if model.q == 3 else ((1, 0), 2))
        return charge_block_problem(model, L, sector, perm, order)
    return sector_problem(model, L, sector, **kw)


def disorder_histogram(model, L: int, sector: int | str | None = None, n_real: int = DEFAULT_REALIZATIONS,
                       bins: int = DEFAULT_BINS, seed: int = 0, **kw) -> dict:
    """Histogram of gap ratios plus KS distances to GOE, 2GOE, 3GOE and Poisson."""
    prob = build_problem(model, L, sector, **kw)
    sample = collect_ratios(prob, n_real, seed)
    centers, dens = sample.histogram(bins)
    return {"sample": sample, "bin_center": centers, "density": dens, "summary": sample.summary()}
