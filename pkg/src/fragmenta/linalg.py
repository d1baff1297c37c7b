"""Dense eigensolves, kernels and orthogonal complements with explicit tolerances."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

KERNEL_RTOL = 1e-10


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of each column positive (real case)."""
    if vecs.size == 0 or np.iscomplexobj(vecs):
        return vecs
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with orthonormal eigenvectors as columns."""

    values: np.ndarray
    vectors: np.ndarray

    def residual(self, M: np.ndarray) -> float:
        if self.values.size == 0:
            return 0.0
        return float(np.max(np.linalg.norm(M @ self.vectors - self.vectors * self.values, axis=0)))


@dataclass(frozen=True)
class SubspaceBasis:
    """Column-orthonormal basis of a subspace of a ``dim``-dimensional space."""

    basis: np.ndarray
    label: str = ""
    gap: float | None = None

    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])

    @property
    def ambient(self) -> int:
        return int(self.basis.shape[0])

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def orthonormality_error(self) -> float:
        if self.dim == 0:
            return 0.0
        G = self.basis.conj().T @ self.basis
        return float(np.max(np.abs(G - np.eye(self.dim))))


def sym_eig(M: np.ndarray) -> Spectrum:
    """Eigendecomposition of a real symmetric or complex Hermitian matrix.

    >>> sym_eig(np.array([[0.5, 0.5], [0.5, 0.5]])).values.round(12)
    array([0., 1.])
    """
    M = np.asarray(M)
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    if M.shape[0] == 0:
        return Spectrum(np.zeros(0), np.zeros((0, 0)))
    vals, vecs = sla.eigh(M)
    return Spectrum(vals, _fix_signs(vecs))


def null_space(M: np.ndarray, rel_tol: float = KERNEL_RTOL, psd: bool = True, label: str = "EFS") -> SubspaceBasis:
    """Kernel of ``M``.

    With ``psd=True`` ``M`` must be symmetric positive semidefinite and the
    kernel is spanned by eigenvectors with ``lambda <= rel_tol * lambda_max``.
    Otherwise ``M`` may be any (possibly rectangular) matrix and the kernel
    comes from its SVD with the same relative threshold on singular values.
    ``gap`` records the smallest retained-out eigen/singular value relative to
    the largest, so a marginal classification is visible to callers.
    """
    M = np.asarray(M)
    n = M.shape[1]
    if n == 0:
        return SubspaceBasis(np.zeros((0, 0)), label)
    if psd:
        spec = sym_eig(M)
        top = max(spec.values[-1], 0.0)
        if top == 0.0:
            return SubspaceBasis(spec.vectors, label, None)
        mask = spec.values <= rel_tol * top
        rest = spec.values[~mask]
        gap = float(rest.min() / top) if rest.size else None
        return SubspaceBasis(spec.vectors[:, mask], label, gap)
    _, s, vh = np.linalg.svd(M, full_matrices=True)
    top = s[0] if s.size else 0.0
    if top == 0.0:
        return SubspaceBasis(np.eye(n), label, None)
    rank = int(np.sum(s > rel_tol * top))
    kernel = vh[rank:].conj().T
    gap = float(s[rank - 1] / top) if rank else None
    return SubspaceBasis(_fix_signs(kernel), label, gap)


def project_out(ambient: SubspaceBasis | np.ndarray, subspace: SubspaceBasis, label: str = "Kq",
                tol: float = 1e-10) -> SubspaceBasis:
    """Orthogonal complement of ``subspace`` inside ``ambient``.

    ``ambient`` may be an integer-free identity (pass ``np.eye(D)``).
    """
    A = ambient.basis if isinstance(ambient, SubspaceBasis) else np.asarray(ambient)
    S = subspace.basis
    for name, X in (("ambient", A), ("subspace", S)):
        if X.shape[1] and np.max(np.abs(X.conj().T @ X - np.eye(X.shape[1]))) > 1e-8:
            raise ValueError(f"{name} basis is not orthonormal")
    if S.shape[1] == 0:
        return SubspaceBasis(A.copy(), label)
    # coordinates of the subspace inside the ambient
    C = A.conj().T @ S
    if np.linalg.norm(A @ C - S) > 1e-8 * max(1, np.sqrt(S.shape[1])):
        raise ValueError("subspace is not contained in the ambient space")
    target = A.shape[1] - S.shape[1]
    if target == 0:
        return SubspaceBasis(np.zeros((A.shape[0], 0), dtype=A.dtype), label)
    u, s, _ = np.linalg.svd(C, full_matrices=True)
    comp = u[:, S.shape[1]:]
    return SubspaceBasis(_fix_signs(A @ comp), label)


def orth(X: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis for the column span of ``X``."""
    if X.shape[1] == 0:
        return X
    u, s, _ = np.linalg.svd(X, full_matrices=False)
    rank = int(np.sum(s > tol * max(s[0], 1e-300)))
    return u[:, :rank]


def subspace_angle(A: np.ndarray, B: np.ndarray) -> float:
    """Largest principal angle between two column spans (radians)."""
    return float(np.max(sla.subspace_angles(A, B))) if A.shape[1] and B.shape[1] else 0.0
