import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from fragmenta.linalg import null_space, orth, project_out, subspace_angle, sym_eig


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.integers(0, 5), st.integers(0, 2**31))
def test_psd_kernel_dimension(n, k, seed):
    k = min(k, n)
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n - k))
    M = A @ A.T
    ker = null_space(M)
    assert ker.dim == k
    assert ker.orthonormality_error() < 1e-10
    if k:
        assert np.linalg.norm(M @ ker.basis) <= 1e-8 * np.linalg.norm(M)


def test_svd_kernel_rectangular():
    M = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 0.0]])
    ker = null_space(M, psd=False)
    assert ker.dim == 2


def test_zero_matrix_kernel_is_everything():
    assert null_space(np.zeros((4, 4))).dim == 4


def test_nonfinite_rejected():
    with pytest.raises(ValueError):
        sym_eig(np.array([[np.nan]]))


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 10), st.integers(1, 2), st.integers(0, 2**31))
def test_project_out_is_complement(n, k, seed):
    rng = np.random.default_rng(seed)
    S = orth(rng.normal(size=(n, k)))
    from fragmenta.linalg import SubspaceBasis
    C = project_out(np.eye(n), SubspaceBasis(S))
    assert C.dim == n - k
    assert np.max(np.abs(C.basis.T @ S)) < 1e-12


def test_project_out_rejects_foreign_subspace():
    from fragmenta.linalg import SubspaceBasis
    A = np.eye(3)[:, :2]
    S = SubspaceBasis(np.eye(3)[:, 2:])
    with pytest.raises(ValueError):
        project_out(A, S)


def test_subspace_angle_basic():
    a = np.eye(3)[:, :1]
    b = np.array([[1.0], [1.0], [0.0]]) / np.sqrt(2)
    assert np.isclose(subspace_angle(a, b), np.pi / 4)
