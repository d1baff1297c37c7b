"""Local Hamiltonian terms for the constrained chain models.

Every model provides a list of local terms, each a dense matrix acting on a
window of consecutive sites.  The full Hamiltonian is ``H = sum_i J_i h_i``
with bond couplings ``J_i`` drawn from :class:`Coupling`.  Restriction to a
classical sector never builds the ``q**L`` dimensional operator: matrix
elements are generated from window codes of the sector members.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Sequence

import numpy as np

from .words import RewriteRule, pattern_code

VARIANTS = ("asymmetric", "ghz", "cyclic", "tl", "breakdown", "east")


@dataclass(frozen=True)
class Coupling:
    """Bond-coupling distribution: ``fixed`` (all equal to ``value``) or ``uniform[lo, hi]``."""

    kind: str = "uniform"
    lo: float = 0.5
    hi: float = 1.5
    value: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("fixed", "uniform"):
            raise ValueError(f"unknown coupling kind {self.kind!r}")
        if self.kind == "uniform" and not self.lo < self.hi:
            raise ValueError("uniform coupling needs lo < hi")

    def draw(self, rng: np.random.Generator | None, n: int) -> np.ndarray:
        if self.kind == "fixed":
            return np.full(n, float(self.value))
        if rng is None:
            raise ValueError("random couplings need a generator")
        return rng.uniform(self.lo, self.hi, size=n)

    def to_dict(self) -> dict:
        if self.kind == "fixed":
            return {"kind": "fixed", "value": self.value}
        return {"kind": "uniform", "lo": self.lo, "hi": self.hi}


FIXED = Coupling("fixed")


@dataclass(frozen=True)
class LocalOperator:
    """Dense operator on the sites ``[start, start + window_len)``."""

    start: int
    matrix: np.ndarray
    q: int

    @property
    def window_len(self) -> int:
        return int(round(np.log(self.matrix.shape[0]) / np.log(self.q)))

    def nonzeros(self) -> list[tuple[int, int, float]]:
        """``(row, col, value)`` triples with nonzero value."""
        rows, cols = np.nonzero(self.matrix)
        return [(int(r), int(c), float(self.matrix[r, c])) for r, c in zip(rows, cols)]

    def embed(self, L: int) -> np.ndarray:
        """Full ``q**L`` matrix (small L only; used by tests)."""
        left = np.eye(self.q**self.start)
        right = np.eye(self.q ** (L - self.start - self.window_len))
        return np.kron(np.kron(left, self.matrix), right)


def _projector(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=float)
    vec = vec / np.linalg.norm(vec)
    return np.outer(vec, vec)


def _state(patterns: Sequence[str], q: int, amplitudes: Sequence[float] | None = None) -> np.ndarray:
    ell = len(patterns[0])
    vec = np.zeros(q**ell)
    amps = np.ones(len(patterns)) if amplitudes is None else amplitudes
    for p, a in zip(patterns, amps):
        vec[pattern_code([int(c) for c in p], q)] += a
    return vec


@dataclass(frozen=True)
class ModelSpec:
    """A chain model plus its bond-coupling distribution.

    Use the constructors :func:`asymmetric`, :func:`ghz`, :func:`cyclic`,
    :func:`temperley_lieb`, :func:`breakdown` and :func:`east` rather than
    building this directly.
    """

    variant: str
    params: tuple[tuple[str, object], ...] = ()
    coupling: Coupling = field(default_factory=Coupling)

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown model variant {self.variant!r}")

    def param(self, key: str):
        return dict(self.params)[key]

    def with_coupling(self, coupling: Coupling) -> "ModelSpec":
        return ModelSpec(self.variant, self.params, coupling)

    @property
    def name(self) -> str:
        return self.variant

    @property
    def q(self) -> int:
        v = self.variant
        if v in ("asymmetric", "ghz"):
            return len(self.param("coeffs"))
        if v in ("cyclic", "tl"):
            return 3
        if v == "breakdown":
            return 2 ** int(self.param("N"))
        return 2

    @property
    def window_len(self) -> int:
        return {"asymmetric": 3, "ghz": 3, "cyclic": 3, "tl": 2, "breakdown": 2, "east": 4}[self.variant]

    @property
    def psd(self) -> bool:
        """Whether every local term is positive semidefinite."""
        return self.variant in ("asymmetric", "ghz", "cyclic", "tl")

    @property
    def triplet_family(self) -> bool:
        return self.variant in ("asymmetric", "ghz")

    @property
    def gamma(self) -> float:
        """``a/b`` for the two-letter triplet-flip models."""
        if not self.triplet_family or self.q != 2:
            raise ValueError("gamma is defined for the q=2 triplet-flip models")
        a, b = self.param("coeffs")
        return a / b

    def rules(self) -> list[RewriteRule]:
        """Classical rewrite classes (for the class-based models)."""
        q = self.q
        if self.triplet_family:
            return [RewriteRule(tuple((a, a, a) for a in range(q)), q, "X")]
        if self.variant == "cyclic":
            return [RewriteRule.from_strings(["012", "120", "201"], 3, "X"),
                    RewriteRule.from_strings(["021", "102", "210"], 3, "Y")]
        if self.variant == "tl":
            return [RewriteRule.from_strings(["00", "11", "22"], 3, "X")]
        raise ValueError(f"{self.variant} has no class-based rewrite rules")

    @cached_property
    def _base_matrix(self) -> np.ndarray:
        q = self.q
        v = self.variant
        if self.triplet_family:
            coeffs = self.param("coeffs")
            return _projector(_state([str(a) * 3 for a in range(q)], q, coeffs))
        if v == "cyclic":
            plus = _projector(_state(["012", "120", "201"], 3))
            minus = _projector(_state(["021", "102", "210"], 3))
            return self.param("alpha") * plus + self.param("beta") * minus
        if v == "tl":
            return _projector(_state(["00", "11", "22"], 3))
        if v == "breakdown":
            return _breakdown_matrix(int(self.param("N")), self.param("flavor_couplings"))
        raise ValueError("east terms depend on position; use local_terms")

    def local_term(self, i: int, L: int | None = None) -> LocalOperator:
        """Unit-coupling local term with window starting at site ``i``.

        For the East model ``i`` labels the hop bond ``(i, i+1)``.
        """
        if self.variant == "east":
            if L is None:
                raise ValueError("east terms need L")
            return _east_term(i, L, self.param("t1"), self.param("t2"))
        return LocalOperator(i, self._base_matrix, self.q)

    def local_terms(self, L: int) -> list[LocalOperator]:
        if L < self.window_len:
            raise ValueError(f"L={L} shorter than the window length {self.window_len}")
        if self.variant == "east":
            return east_local_terms(L, self.param("t1"), self.param("t2"))
        return [self.local_term(i) for i in range(L - self.window_len + 1)]

    def to_dict(self) -> dict:
        out = {"variant": self.variant, "coupling": self.coupling.to_dict()}
        for k, v in self.params:
            out[k] = list(v) if isinstance(v, tuple) else v
        return out


def asymmetric(a: float = 1 / np.sqrt(5), b: float = 2 / np.sqrt(5), coeffs: Sequence[float] | None = None,
               coupling: Coupling | None = None) -> ModelSpec:
    """Triplet-flip projector onto ``sum_a c_a |aaa>`` (default ``a|000> + b|111>``).

    ``coeffs`` of length 3 gives the qutrit version.
    """
    c = np.asarray(coeffs if coeffs is not None else (a, b), dtype=float)
    if np.any(c == 0):
        raise ValueError("all triplet coefficients must be nonzero")
    c = c / np.linalg.norm(c)
    return ModelSpec("asymmetric", (("coeffs", tuple(float(x) for x in c)),), coupling or Coupling())


def ghz(q: int = 2, coupling: Coupling | None = None) -> ModelSpec:
    """Equal-weight triplet-flip projector (GHZ for q=2, permutation-symmetric for q=3)."""
    c = tuple([1 / np.sqrt(q)] * q)
    return ModelSpec("ghz", (("coeffs", c),), coupling or Coupling())


def cyclic(alpha: float = 1.0, beta: float = 0.5, coupling: Coupling | None = None) -> ModelSpec:
    """Cyclic qutrit model ``alpha P+ + beta P-``; ``alpha == beta`` gives the dihedral point."""
    return ModelSpec("cyclic", (("alpha", float(alpha)), ("beta", float(beta))), coupling or Coupling())


def temperley_lieb(coupling: Coupling | None = None) -> ModelSpec:
    """Qutrit singlet projectors onto ``(|00> + |11> + |22>)/sqrt(3)``."""
    return ModelSpec("tl", (), coupling or Coupling())


def breakdown(N: int = 2, flavor_couplings: Sequence[float] = (1.0, 0.7),
              coupling: Coupling | None = None) -> ModelSpec:
    """Hardcore-boson avalanche model with ``N`` flavors per site."""
    if N < 2:
        raise ValueError("the pair-creation term needs N >= 2 flavors")
    fc = tuple(float(x) for x in flavor_couplings)
    if len(fc) != N:
        raise ValueError("need one coupling per flavor")
    return ModelSpec("breakdown", (("N", int(N)), ("flavor_couplings", fc)), coupling or Coupling())


def east(t1: float = 1.0, t2: float = 0.6, coupling: Coupling | None = None) -> ModelSpec:
    """Range-2 particle-conserving East model."""
    return ModelSpec("east", (("t1", float(t1)), ("t2", float(t2))), coupling or Coupling())


def model_from_name(name: str, **kw) -> ModelSpec:
    """Build a model from a CLI-style name (``asymmetric``, ``ghz``, ``ghz3``, ``triplet3``, ...)."""
    coupling = kw.pop("coupling", None)
    if name == "asymmetric":
        return asymmetric(kw.get("a", 1 / np.sqrt(5)), kw.get("b", 2 / np.sqrt(5)), coupling=coupling)
    if name == "triplet3":
        return asymmetric(coeffs=kw.get("coeffs", (1.0, 2.0, 3.0)), coupling=coupling)
    if name == "ghz":
        return ghz(2, coupling=coupling)
    if name == "ghz3":
        return ghz(3, coupling=coupling)
    if name == "cyclic":
        return cyclic(kw.get("alpha", 1.0), kw.get("beta", 0.5), coupling=coupling)
    if name == "cyclic-d3":
        a = kw.get("alpha", 1.0)
        return cyclic(a, a, coupling=coupling)
    if name == "tl":
        return temperley_lieb(coupling=coupling)
    if name == "breakdown":
        return breakdown(kw.get("N", 2), coupling=coupling)
    if name == "east":
        return east(kw.get("t1", 1.0), kw.get("t2", 0.6), coupling=coupling)
    raise ValueError(f"unknown model name {name!r}")


MODEL_NAMES = ("asymmetric", "triplet3", "ghz", "ghz3", "cyclic", "cyclic-d3", "tl", "breakdown", "east")


# ---------------------------------------------------------------- breakdown

def breakdown_digit(occupied: Sequence[int]) -> int:
    """Site digit for a set of occupied flavors (flavor ``nu`` is bit ``nu - 1``)."""
    return sum(1 << (nu - 1) for nu in occupied)


def _breakdown_matrix(N: int, flavor_couplings: Sequence[float]) -> np.ndarray:
    q = 2**N
    mat = np.zeros((q * q, q * q))
    pair = 0b11  # flavors 1 and 2 on the receiving site
    for left, right in product(range(q), repeat=2):
        if right & pair:
            continue
        for nu in range(1, N + 1):
            bit = 1 << (nu - 1)
            if not left & bit:
                continue
            src = left * q + right
            dst = (left ^ bit) * q + (right | pair)
            mat[dst, src] += flavor_couplings[nu - 1]
            mat[src, dst] += flavor_couplings[nu - 1]
    return mat


# --------------------------------------------------------------------- east

def _east_term(j: int, L: int, t1: float, t2: float) -> LocalOperator:
    """Hop on bond ``(j, j+1)`` gated by the two sites to its left, on a 4-site window."""
    if not 1 <= j <= L - 2:
        raise ValueError(f"hop bond {j} outside [1, {L - 2}]")
    start = min(max(j - 2, 0), L - 4)
    mat = np.zeros((16, 16))
    for bits in product((0, 1), repeat=4):
        site = {start + k: b for k, b in enumerate(bits)}
        a, b = site[j], site[j + 1]
        if a == b:
            continue
        n1 = site.get(j - 1, 0)
        n2 = site.get(j - 2, 0)
        amp = t1 * n1 + t2 * (1 - n1) * n2
        if amp == 0:
            continue
        new = dict(site)
        new[j], new[j + 1] = b, a
        src = pattern_code(bits, 2)
        dst = pattern_code([new[start + k] for k in range(4)], 2)
        mat[dst, src] = amp
    return LocalOperator(start, mat, 2)


def east_local_terms(L: int, t1: float, t2: float) -> list[LocalOperator]:
    """Physical East terms ``h_j`` for every hop bond ``j = 1..L-2`` as 4-site windows."""
    if L < 4:
        raise ValueError("the East model needs L >= 4")
    return [_east_term(j, L, t1, t2) for j in range(1, L - 1)]


def east_block(t1: float, t2: float) -> np.ndarray:
    """The 4-site block of the East Hamiltonian (both hops inside one window)."""
    return sum(t.matrix for t in east_local_terms(4, t1, t2))


# ------------------------------------------------------ sector restriction

def restrict_term(term: LocalOperator, members: np.ndarray, L: int, sparse: bool = False):
    """Matrix of a local term on the coordinate basis ``members`` (ascending indices).

    ``sparse=True`` returns a CSR matrix instead of a dense array.
    """
    members = np.asarray(members, dtype=np.int64)
    q, ell = term.q, term.window_len
    place = q ** (L - ell - term.start)
    codes = (members // place) % (q**ell)
    D = len(members)
    if sparse:
        from scipy.sparse import csr_matrix
        rows, cols, vals = [], [], []
    else:
        out = np.zeros((D, D))
    for row, col, val in term.nonzeros():
        src = np.nonzero(codes == col)[0]
        if src.size == 0:
            continue
        dst_idx = members[src] + (row - col) * place
        pos = np.searchsorted(members, dst_idx)
        ok = (pos < D)
        ok[ok] = members[pos[ok]] == dst_idx[ok]
        if not np.all(ok):
            raise ValueError("local term maps a member outside the given basis")
        if sparse:
            rows.append(pos)
            cols.append(src)
            vals.append(np.full(src.size, val))
        else:
            out[pos, src] += val
    if sparse:
        if not rows:
            return csr_matrix((D, D))
        return csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(D, D))
    return out


def sector_terms(model: ModelSpec, members: np.ndarray, L: int, sparse: bool = False) -> list:
    """Unit-coupling local terms restricted to a sector."""
    return [restrict_term(t, members, L, sparse) for t in model.local_terms(L)]


@dataclass(frozen=True)
class SectorHamiltonian:
    sector_id: int
    members: np.ndarray
    matrix: np.ndarray
    couplings: np.ndarray


def build_sector_hamiltonian(model: ModelSpec, catalog, sector_id: int,
                             rng: np.random.Generator | None = None,
                             terms: list[np.ndarray] | None = None) -> SectorHamiltonian:
    """``sum_i J_i h_i`` on one classical sector, couplings drawn from ``model.coupling``."""
    if catalog.model != model.name or catalog.q != model.q:
        raise ValueError(f"catalog built for {catalog.model} (q={catalog.q}), not {model.name}")
    members = catalog.members(sector_id)
    if terms is None:
        terms = sector_terms(model, members, catalog.L)
    J = model.coupling.draw(rng, len(terms))
    H = np.zeros((len(members), len(members)))
    for j, h in zip(J, terms):
        H += j * h
    return SectorHamiltonian(sector_id, members, H, J)


def combine(terms: Sequence[np.ndarray], couplings: Sequence[float]) -> np.ndarray:
    H = np.zeros_like(terms[0])
    for j, h in zip(couplings, terms):
        H += j * h
    return H


# -------------------------------------------------------------- symmetries

def digit_permutation(perm: Sequence[int], members: np.ndarray, L: int, q: int) -> np.ndarray:
    """Matrix of the on-site relabelling ``a -> perm[a]`` on a sector basis.

    Raises ``ValueError`` naming an image word if the sector is not mapped to itself.
    """
    pos = digit_permutation_indices(perm, members, L, q)
    P = np.zeros((len(members), len(members)))
    P[pos, np.arange(len(members))] = 1.0
    return P


def digit_permutation_indices(perm: Sequence[int], members: np.ndarray, L: int, q: int) -> np.ndarray:
    """Position in ``members`` of the image of each member under ``a -> perm[a]``."""
    from .words import decode_array, encode_array

    perm = np.asarray(perm, dtype=np.int64)
    members = np.asarray(members, dtype=np.int64)
    images = encode_array(perm[decode_array(members, L, q)], q)
    pos = np.searchsorted(members, images)
    ok = pos < len(members)
    ok[ok] = members[pos[ok]] == images[ok]
    if not np.all(ok):
        bad = int(images[np.argmin(ok)])
        from .words import decode_index
        raise ValueError(f"symmetry maps the sector outside itself (image word {decode_index(bad, L, q)})")
    return pos


# ------------------------------------------------- TL standard modules

def link_states(L: int, j: int) -> list[tuple[int, ...]]:
    """Link patterns on ``L`` points with ``j`` through-lines (defects).

    Each state is a tuple ``partner`` with ``partner[x] = y`` for an arc
    ``(x, y)`` and ``-1`` for a defect; arcs never enclose defects.
    """
    if (L - j) % 2 or not 0 <= j <= L:
        raise ValueError("j must have the parity of L and lie in [0, L]")
    out: list[tuple[int, ...]] = []

    def rec(pos: int, stack: list[int], partner: list[int], defects: int) -> None:
        if pos == L:
            if not stack and defects == j:
                out.append(tuple(partner))
            return
        remaining = L - pos
        # open an arc
        if len(stack) + 1 <= remaining - 1:
            partner.append(-2)
            stack.append(pos)
            rec(pos + 1, stack, partner, defects)
            stack.pop()
            partner.pop()
        # close an arc
        if stack:
            x = stack.pop()
            partner[x] = pos
            partner.append(x)
            rec(pos + 1, stack, partner, defects)
            partner.pop()
            partner[x] = -2
            stack.append(x)
        # defect (only outside every arc)
        if not stack and defects < j:
            partner.append(-1)
            rec(pos + 1, stack, partner, defects + 1)
            partner.pop()

    rec(0, [], [], 0)
    return out


def tl_module_generators(L: int, j: int, loop: float = 3.0) -> list[np.ndarray]:
    """Unnormalized generators ``E_i`` (``E_i^2 = loop E_i``) on the standard module with ``j`` defects."""
    states = link_states(L, j)
    index = {s: n for n, s in enumerate(states)}
    gens = []
    for i in range(L - 1):
        E = np.zeros((len(states), len(states)))
        for n, s in enumerate(states):
            a, b = s[i], s[i + 1]
            if a == i + 1:
                E[n, n] += loop
                continue
            if a == -1 and b == -1:
                continue
            new = list(s)
            new[i], new[i + 1] = i + 1, i
            if a >= 0 and b >= 0:
                new[a], new[b] = b, a
            elif a >= 0:
                new[a] = -1
            else:
                new[b] = -1
            E[index[tuple(new)], n] += 1.0
        gens.append(E)
    return gens


# -------------------------------------------------- breakdown / east extras

def particle_parity(members: np.ndarray, L: int, q: int) -> np.ndarray:
    """Diagonal of ``(-1)**(total occupation)`` for hardcore-boson digits on a sector basis."""
    from .words import decode_array

    digits = decode_array(np.asarray(members), L, q)
    pop = np.vectorize(lambda d: bin(int(d)).count("1"))(digits).sum(axis=1) if digits.size else np.zeros(0)
    return (-1.0) ** pop


def breakdown_hamiltonian(L: int, N: int, couplings) -> list[SectorHamiltonian]:
    """Breakdown Hamiltonian on every mobile classical sector.

    ``couplings`` is either one value per flavor (shared by all bonds) or an
    ``(L-1, N)`` array ``J_i^nu``.
    """
    from .classical import enumerate_sectors

    J = np.asarray(couplings, dtype=float)
    if J.ndim == 1:
        J = np.broadcast_to(J, (L - 1, N))
    if J.shape != (L - 1, N):
        raise ValueError(f"couplings must have shape ({L - 1}, {N})")
    model = breakdown(N, tuple(np.ones(N)), coupling=FIXED)
    cat = enumerate_sectors(model, L)
    out = []
    for s in cat.mobile():
        members = cat.members(int(s))
        H = np.zeros((len(members), len(members)))
        for i in range(L - 1):
            mat = _breakdown_matrix(N, J[i])
            H += restrict_term(LocalOperator(i, mat, 2**N), members, L)
        out.append(SectorHamiltonian(int(s), members, H, J.copy()))
    return out


def dipole_orbit_state(word: str, t1: float, t2: float) -> tuple[np.ndarray, np.ndarray]:
    """Orbit of a binary word under ``1100 <-> 1001`` with weights ``(-t1/t2)**(mu/2)``.

    ``mu`` is the dipole moment ``sum_j j n_j``; each move raises it by 2.
    Returns ``(indices, amplitudes)`` with ascending indices, normalized.
    """
    L = len(word)
    start = tuple(int(c) for c in word)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for w in frontier:
            for i in range(L - 3):
                win = w[i:i + 4]
                for a, b in (((1, 1, 0, 0), (1, 0, 0, 1)), ((1, 0, 0, 1), (1, 1, 0, 0))):
                    if win == a:
                        v = w[:i] + b + w[i + 4:]
                        if v not in seen:
                            seen.add(v)
                            nxt.append(v)
        frontier = nxt
    words = sorted(seen, key=lambda w: pattern_code(w, 2))
    mu = np.array([sum(j * n for j, n in enumerate(w)) for w in words])
    ratio = -t1 / t2
    amps = np.sign(ratio) ** ((mu - mu.min()) // 2) * abs(ratio) ** ((mu - mu.min()) / 2)
    idx = np.array([pattern_code(w, 2) for w in words], dtype=np.int64)
    return idx, amps / np.linalg.norm(amps)
