"""Entangled frozen states and the irreducible decomposition of ``K_q``.

The EFS subspace of a classical sector is the common kernel of the local
terms.  Its orthogonal complement ``K_q`` is split into minimal subspaces
invariant under every local term as follows.

1. Diagonalize a random combination ``H1`` of the terms on ``K_q`` and group
   its eigenvalues into degenerate clusters.
2. Connect two clusters when some term couples them; each connected
   component is invariant (an isotypic component, up to accidents).
3. Inside a component, the coupling blocks of a second random combination
   ``H2`` transport the coordinates of every cluster onto a root cluster
   along a maximum spanning tree.  Transport around the remaining edges
   gives holonomy matrices.  When every holonomy is a multiple of the
   identity, the component is ``rho (x) C^m`` and the ``m`` aligned copies
   are the blocks; otherwise the eigenspaces of a random holonomy split the
   component further and the procedure recurses.
4. Every block is re-verified against every local term.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .linalg import SubspaceBasis, null_space, orth, project_out, sym_eig

CLUSTER_RTOL = 1e-9
BLOCK_TOL = 1e-8
ISO_TOL = 1e-8


class DecompositionAmbiguity(RuntimeError):
    """A candidate block failed re-verification; retry with fresh couplings."""


@dataclass
class Block:
    dim: int
    basis: np.ndarray
    spectrum: np.ndarray
    class_id: int = -1
    charge: int | None = None


@dataclass
class QuantumDecomposition:
    """EFS dimension, irreducible blocks and their isospectral classes for one sector."""

    sector_id: int
    D_cl: int
    efs_dim: int
    blocks: list[Block]
    invariance_residual: float
    efs_gap: float | None = None
    charges: dict | None = None
    seeds: list[int] = field(default_factory=list)

    @property
    def kq_dim(self) -> int:
        return sum(b.dim for b in self.blocks)

    @property
    def N_irr(self) -> int:
        return len(self.blocks)

    @property
    def D_max(self) -> int:
        return max((b.dim for b in self.blocks), default=0)

    def block_dims(self) -> list[int]:
        return sorted(b.dim for b in self.blocks)

    def classes(self) -> list[tuple[int, int]]:
        """``(dim, multiplicity)`` of each isospectral class, sorted."""
        counts: dict[int, list[int]] = {}
        for b in self.blocks:
            counts.setdefault(b.class_id, []).append(b.dim)
        return sorted((dims[0], len(dims)) for dims in counts.values())

    def to_dict(self) -> dict:
        out = {
            "sector": self.sector_id,
            "D_cl": self.D_cl,
            "efs_dim": self.efs_dim,
            "kq_dim": self.kq_dim,
            "blocks": [{"dim": b.dim, "class_id": b.class_id} for b in
                       sorted(self.blocks, key=lambda b: (b.dim, b.class_id))],
            "N_irr": self.N_irr,
            "D_max": self.D_max,
            "invariance_residual": self.invariance_residual,
        }
        if self.charges is not None:
            out["charges"] = self.charges
        return out


# ------------------------------------------------------------------- EFS

def compute_efs(terms: Sequence[np.ndarray], psd: bool = True, rel_tol: float = 1e-10) -> SubspaceBasis:
    """Common kernel of the restricted local terms.

    PSD terms: kernel of their sum.  Otherwise: kernel of the stacked terms.
    """
    if not terms:
        raise ValueError("no local terms")
    if psd:
        return null_space(sum(terms), rel_tol=rel_tol, psd=True, label="EFS")
    return null_space(np.vstack(terms), rel_tol=rel_tol, psd=False, label="EFS")


def ind_amplitudes(members: np.ndarray, L: int, gamma: float) -> np.ndarray:
    """Unnormalized Ind-map amplitudes ``(-gamma^{1/3})^{N_1(w)}`` for q=2 words."""
    members = np.asarray(members, dtype=np.int64)
    ones = np.zeros(len(members), dtype=np.int64)
    for b in range(L):
        ones += (members >> b) & 1
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    base = -np.cbrt(gamma)
    # normalize against the smallest power to keep magnitudes moderate
    return base ** (ones - ones.min())


def ind_construct(L: int, k: int, remainder: str, gamma: float,
                  members: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Analytic EFS of the q=2 triplet-flip sector with ``k`` triplets and N3C ``remainder``.

    Returns ``(members, vector)`` with the vector normalized on the ascending
    member basis.  Each ``000 -> 111`` flip multiplies the amplitude by
    ``-gamma``.
    """
    from .entanglement import reduce_indices

    if any(c not in "01" for c in remainder) or "000" in remainder or "111" in remainder:
        raise ValueError(f"{remainder!r} is not an N3C binary word")
    if 3 * k + len(remainder) != L:
        raise ValueError("3k + |remainder| must equal L")
    if members is None:
        allw = np.arange(2**L, dtype=np.int64)
        lengths, values = reduce_indices(allw, L)
        target = int(remainder, 2) if remainder else 0
        members = allw[(lengths == len(remainder)) & (values == target)]
    vec = ind_amplitudes(members, L, gamma)
    return members, vec / np.linalg.norm(vec)


# --------------------------------------------------------- decomposition

def _clusters(values: np.ndarray, scale: float) -> list[np.ndarray]:
    tol = CLUSTER_RTOL * max(scale, 1e-300)
    breaks = np.nonzero(np.diff(values) > tol)[0] + 1
    return np.split(np.arange(len(values)), breaks)


def _max_spanning_tree(weights: np.ndarray) -> list[tuple[int, int]]:
    """Prim's algorithm on a dense symmetric weight matrix; returns (parent, child) edges."""
    n = weights.shape[0]
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    best = weights[0].copy()
    parent = np.zeros(n, dtype=np.int64)
    edges = []
    for _ in range(n - 1):
        cand = np.where(in_tree, -np.inf, best)
        b = int(np.argmax(cand))
        if not np.isfinite(cand[b]) or cand[b] <= 0:
            raise DecompositionAmbiguity("cluster graph is disconnected inside a component")
        edges.append((int(parent[b]), b))
        in_tree[b] = True
        upd = weights[b] > best
        best = np.where(upd, weights[b], best)
        parent = np.where(upd, b, parent)
    return edges


def _split_component(U: list[np.ndarray], H2: np.ndarray, rng: np.random.Generator,
                     depth: int = 0) -> list[np.ndarray]:
    """Split one connected set of clusters into minimal invariant pieces.

    ``U[a]`` holds orthonormal coordinates of cluster ``a`` as columns.
    """
    c = len(U)
    m = U[0].shape[1]
    if any(u.shape[1] != m for u in U):
        raise DecompositionAmbiguity("clusters of unequal size in one component")
    if m == 1:
        return [orth(np.hstack(U))]
    if c == 1:
        # one degenerate cluster uncoupled from the rest: m one-dimensional blocks
        return [U[0][:, [t]] for t in range(m)]
    HU = [H2 @ u for u in U]
    blocks: dict[tuple[int, int], np.ndarray] = {}
    weights = np.zeros((c, c))
    for a in range(c):
        for b in range(a + 1, c):
            Mab = U[a].conj().T @ HU[b]
            blocks[(a, b)] = Mab
            weights[a, b] = weights[b, a] = np.linalg.svd(Mab, compute_uv=False)[-1]
    edges = _max_spanning_tree(weights)

    def get(a: int, b: int) -> np.ndarray:
        return blocks[(a, b)] if a < b else blocks[(b, a)].conj().T

    R: list[np.ndarray] = [np.eye(m, dtype=U[0].dtype)] * c
    for p, b in edges:
        u, _, vh = np.linalg.svd(get(p, b))
        # polar factor keeps the transport unitary
        R[b] = R[p] @ (u @ vh)
    wmax = weights.max()
    holonomies = []
    for a in range(c):
        for b in range(a + 1, c):
            if weights[a, b] > 1e-6 * wmax:
                G = R[a] @ get(a, b) @ R[b].conj().T
                holonomies.append(G / np.linalg.norm(G, 2))
    off = max(np.linalg.norm(G - np.trace(G) / m * np.eye(m)) for G in holonomies)
    if off <= 1e-7:
        # rho (x) C^m: copy t collects the transported t-th coordinate of every cluster
        return [orth(np.column_stack([U[a] @ R[a].conj().T[:, t] for a in range(c)])) for t in range(m)]
    if depth > 3:
        raise DecompositionAmbiguity("holonomy splitting did not terminate")
    w = rng.standard_normal(len(holonomies)) + 1j * rng.standard_normal(len(holonomies))
    vals, vecs = np.linalg.eig(sum(x * G for x, G in zip(w, holonomies)))
    groups: list[list[int]] = []
    spread = np.abs(vals).max()
    for t in range(m):
        for g in groups:
            if abs(vals[g[0]] - vals[t]) < 1e-6 * spread:
                g.append(t)
                break
        else:
            groups.append([t])
    if len(groups) == 1:
        raise DecompositionAmbiguity("non-scalar holonomy with a single eigenvalue")
    pieces = []
    for g in groups:
        E = orth(vecs[:, g].astype(complex))
        sub = [orth(U[a].astype(complex) @ R[a].conj().T @ E) for a in range(c)]
        pieces.extend(_split_component(sub, H2, rng, depth + 1))
    return pieces


def _decompose_once(terms: list[np.ndarray], rng: np.random.Generator) -> list[np.ndarray]:
    n = terms[0].shape[0]
    J1 = rng.uniform(0.5, 1.5, len(terms))
    J2 = rng.uniform(0.5, 1.5, len(terms))
    H1 = sum(j * h for j, h in zip(J1, terms))
    H2 = sum(j * h for j, h in zip(J2, terms))
    spec = sym_eig(H1)
    V = spec.vectors
    clusters = _clusters(spec.values, np.abs(spec.values).max())
    cid = np.empty(n, dtype=np.int64)
    for a, idx in enumerate(clusters):
        cid[idx] = a
    # eigenvector pairs coupled by some single term
    adj = np.zeros((n, n), dtype=bool)
    for h in terms:
        scale = max(np.abs(h).max(), 1e-300)
        adj |= np.abs(V.T @ h @ V) > BLOCK_TOL * scale
    nc = len(clusters)
    rows, cols = np.nonzero(adj)
    graph = csr_matrix((np.ones(len(rows)), (cid[rows], cid[cols])), shape=(nc, nc))
    ncomp, comp = connected_components(graph, directed=False)
    blocks: list[np.ndarray] = []
    for k in range(ncomp):
        U = [V[:, clusters[a]] for a in np.nonzero(comp == k)[0]]
        blocks.extend(_split_component(U, H2, rng))
    return blocks


def invariance_residual(B: np.ndarray, terms: Sequence[np.ndarray],
                        norms: Sequence[float] | None = None) -> float:
    """``max_i ||(1 - B B^H) h_i B||_F / ||h_i||_2`` (Frobenius bounds the 2-norm)."""
    if norms is None:
        norms = [np.linalg.norm(h, 2) for h in terms]
    worst = 0.0
    for h, nh in zip(terms, norms):
        hB = h @ B
        res = hB - B @ (B.conj().T @ hB)
        worst = max(worst, float(np.linalg.norm(res) / max(nh, 1e-300)))
    return worst


def decompose_kq(terms: Sequence[np.ndarray], efs: SubspaceBasis, rng: np.random.Generator,
                 tol: float = BLOCK_TOL, retries: int = 3, sector_id: int = -1) -> QuantumDecomposition:
    """Split ``K_q`` (complement of ``efs``) into minimal invariant blocks.

    Blocks are returned as bases in the sector coordinates; isospectral
    classes are identified by the spectrum of a random coupling realization.
    """
    D = terms[0].shape[0]
    kq = project_out(np.eye(D), efs)
    n = kq.dim
    if n == 0:
        return QuantumDecomposition(sector_id, D, efs.dim, [], 0.0, efs.gap)
    K = kq.basis
    local = [K.T @ h @ K for h in terms]
    norms = [np.linalg.norm(h, 2) for h in local]
    last_error: Exception | None = None
    for _ in range(retries):
        try:
            raw = _decompose_once(local, rng)
        except DecompositionAmbiguity as exc:
            last_error = exc
            continue
        if sum(b.shape[1] for b in raw) != n:
            last_error = DecompositionAmbiguity("blocks do not tile K_q")
            continue
        resid = max(invariance_residual(b, local, norms) for b in raw)
        if resid > tol:
            last_error = DecompositionAmbiguity(f"invariance residual {resid:.2e} above {tol:.0e}")
            continue
        break
    else:
        raise last_error or DecompositionAmbiguity("decomposition failed")
    Jt = rng.uniform(0.5, 1.5, len(local))
    Ht = sum(j * h for j, h in zip(Jt, local))
    scale = max(np.linalg.norm(Ht, 2), 1e-300)
    blocks = []
    for b in raw:
        spec = np.linalg.eigvalsh(b.conj().T @ Ht @ b)
        blocks.append(Block(b.shape[1], K @ b, spec))
    _assign_classes(blocks, scale)
    return QuantumDecomposition(sector_id, D, efs.dim, blocks, resid, efs.gap)


def _assign_classes(blocks: list[Block], scale: float) -> None:
    reps: list[Block] = []
    for b in sorted(blocks, key=lambda x: (x.dim, tuple(np.round(x.spectrum / scale, 6)))):
        for r in reps:
            if r.dim == b.dim and np.max(np.abs(r.spectrum - b.spectrum)) <= ISO_TOL * scale * 10:
                b.class_id = r.class_id
                break
        else:
            b.class_id = len(reps)
            reps.append(b)


# ---------------------------------------------------------------- charges

def charge_resolve(kq_basis: np.ndarray, symmetry: np.ndarray, order: int) -> list[tuple[int, SubspaceBasis]]:
    """Eigenspaces of a symmetry of finite ``order`` restricted to ``K_q``.

    Charge ``c`` labels the eigenvalue ``exp(2 pi i c / order)``.  The
    conjugate pair of a cyclic symmetry is returned as two complex
    eigenspaces of equal dimension.
    """
    S = kq_basis.conj().T @ symmetry @ kq_basis
    if np.linalg.norm(S @ S.conj().T - np.eye(S.shape[0])) > 1e-8 * max(1, S.shape[0]):
        raise ValueError("symmetry does not preserve K_q")
    out = []
    for c in range(order):
        lam = np.exp(2j * np.pi * c / order)
        P = np.eye(S.shape[0], dtype=complex)
        for d in range(order):
            if d != c:
                mu = np.exp(2j * np.pi * d / order)
                P = P @ (S - mu * np.eye(S.shape[0])) / (lam - mu)
        basis = orth(kq_basis @ P)
        if order == 2 and np.allclose(basis.imag, 0, atol=1e-12):
            basis = basis.real
        out.append((c, SubspaceBasis(basis, f"charge({c})")))
    return out


# ----------------------------------------------------------- classification

def classify_fragmentation(series: Sequence[tuple[int, int, int]]) -> dict:
    """Weak/strong verdict from ``(L, N_irr, D_max/D_q pieces)`` data.

    ``series`` holds ``(L, N_irr, D_max, D_q)`` tuples, at least three sizes.
    Strong: ``D_max/D_q`` strictly decreasing and ``N_irr`` strictly
    increasing.  Weak: ``N_irr`` constant.  Otherwise inconclusive.
    """
    if len(series) < 3:
        raise ValueError("need at least three system sizes")
    rows = sorted(series)
    ratios = [dmax / dq for _, _, dmax, dq in rows]
    nirr = [n for _, n, _, _ in rows]
    if all(b < a for a, b in zip(ratios, ratios[1:])) and all(b > a for a, b in zip(nirr, nirr[1:])):
        label = "strong"
    elif len(set(nirr)) == 1:
        label = "weak"
    else:
        label = "inconclusive"
    return {"label": label,
            "trend": [{"L": L, "N_irr": n, "D_max": dm, "D_q": dq, "ratio": dm / dq} for L, n, dm, dq in rows]}


# ------------------------------------------------------------ convenience

def decompose_sector(model, catalog, sector_id: int, rng: np.random.Generator) -> QuantumDecomposition:
    """EFS plus block decomposition of one sector of ``catalog``."""
    from .models import sector_terms

    members = catalog.members(sector_id)
    terms = sector_terms(model, members, catalog.L)
    efs = compute_efs(terms, psd=model.psd)
    return decompose_kq(terms, efs, rng, sector_id=sector_id)


def breakdown_decomposition(L: int = 3, N: int = 2, flavor_couplings=(1.0, 0.7), sector_word: str = "300",
                            rng: np.random.Generator | None = None) -> QuantumDecomposition:
    """EFS and blocks of a breakdown-model sector with bond-uniform couplings.

    Frozen states are the kernel of the full Hamiltonian (they need equal
    couplings on every bond).  Blocks are minimal subspaces of ``K_q``
    invariant under ``H`` and the particle-number parity, which anticommutes
    with ``H`` and pairs the levels ``+E`` and ``-E``.
    """
    from .classical import enumerate_sectors
    from .models import FIXED, breakdown, particle_parity, sector_terms

    rng = rng or np.random.default_rng(0)
    model = breakdown(N, flavor_couplings, coupling=FIXED)
    cat = enumerate_sectors(model, L)
    sid = cat.sector_of(sector_word)
    members = cat.members(sid)
    H = sum(sector_terms(model, members, L))
    efs = null_space(H, psd=False)
    parity = np.diag(particle_parity(members, L, model.q))
    return decompose_kq([H, parity], efs, rng, sector_id=sid)
