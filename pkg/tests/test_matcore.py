import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from matfn.errors import DomainError
from matfn.gammakit import GAMMA
from matfn.matcore import (
    ExpScaled,
    Identity,
    commutator_norm,
    decompose,
    eigenprojectors,
    fro_norm,
    matfun,
    matpow_base,
    simultaneous_diagonalization,
)


def test_decompose_diagonal_shortcut():
    d = decompose(np.diag([1.0, 2.0]))
    assert d.kind == "diagonalizable"
    assert_allclose(np.sort(d.eigenvalues.real), [1, 2])
    assert_allclose(d.V, np.eye(2))


def test_decompose_defective_is_triangular():
    d = decompose([[0.0, 1.0], [0.0, 0.0]])
    assert d.kind == "triangular"


def test_decompose_identity():
    d = decompose(np.eye(3))
    assert d.kind == "diagonalizable"
    assert_allclose(d.eigenvalues, [1, 1, 1])


@pytest.mark.parametrize("M", [np.diag([1.0, 2.0]), [[2.0, 1.0], [0.0, 3.0]], [[0.0, 1.0], [0.0, 0.0]]])
def test_decompose_reconstructs(M):
    assert_allclose(decompose(M).reconstruct(), np.asarray(M, dtype=complex), atol=1e-14)


def test_matfun_exp_of_zero():
    assert_allclose(matfun(np.zeros((3, 3)), ExpScaled()), np.eye(3))


def test_matfun_gamma_triangular():
    # f(M)_12 = m_12 (f(3) - f(2)) / (3 - 2) with Gamma(2) = 1, Gamma(3) = 2
    assert_allclose(matfun([[2.0, 1.0], [0.0, 3.0]], GAMMA), [[1, 1], [0, 2]], atol=1e-13)


def test_matfun_identity_map():
    M = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert_allclose(matfun(M, Identity()), M, atol=1e-13)


def test_matfun_plain_callable():
    M = np.array([[1.0, 0.5], [0.0, 2.0]])
    assert_allclose(matfun(M, lambda z: z**2), M @ M, atol=1e-13)


def test_matfun_rejects_non_finite_value():
    with np.errstate(divide="ignore"), pytest.raises(DomainError, match="eigenvalue"):
        matfun(np.diag([1.0, 0.0]), lambda z: np.log(np.abs(z)))


def test_matfun_rejects_nan_input():
    with pytest.raises(DomainError):
        matfun([[np.nan]], ExpScaled())


def test_matpow_examples():
    assert_allclose(matpow_base(1.0, [[3.0, 1.0], [2.0, 5.0]]), np.eye(2))
    assert_allclose(matpow_base(4.0, np.diag([0.5, 1.0])), np.diag([2.0, 4.0]))
    assert_allclose(matpow_base(math.e, [[0.0, 1.0], [0.0, 0.0]]), [[1, 1], [0, 1]], atol=1e-14)


@pytest.mark.parametrize("t", [0.0, -1.0, 1j])
def test_matpow_rejects_bad_base(t):
    with pytest.raises(DomainError):
        matpow_base(t, np.eye(2))


def test_fro_norm_examples():
    assert fro_norm(np.eye(2)) == pytest.approx(math.sqrt(2))
    assert fro_norm(np.diag([3.0, 4.0])) == pytest.approx(5.0)
    assert fro_norm(np.zeros((2, 2))) == 0.0


def test_commutator_norm():
    assert commutator_norm(np.diag([1.0, 2.0]), np.diag([3.0, 4.0])) == 0.0
    assert commutator_norm(np.array([[0.0, 1.0], [0.0, 0.0]]), np.array([[0.0, 0.0], [1.0, 0.0]])) > 0.1


def test_simultaneous_diagonalization(rng):
    S = np.eye(3) + 0.3 * rng.standard_normal((3, 3))
    Si = np.linalg.inv(S)
    X = S @ np.diag([1.0, 1.0, 2.0]) @ Si  # repeated eigenvalue in X
    Y = S @ np.diag([3.0, 4.0, 5.0]) @ Si
    V, Vinv, x, y = simultaneous_diagonalization(X, Y)
    assert_allclose(V @ np.diag(x) @ Vinv, X, atol=1e-12)
    assert_allclose(V @ np.diag(y) @ Vinv, Y, atol=1e-12)
    assert simultaneous_diagonalization(X, [[0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]) is None


def test_eigenprojectors_sum_to_identity(rng):
    M = rng.standard_normal((4, 4))
    lam, P = eigenprojectors(M)
    assert_allclose(sum(P), np.eye(4), atol=1e-12)
    assert_allclose(sum(l * Pk for l, Pk in zip(lam, P)), M, atol=1e-12)


def test_eigenprojectors_defective_is_none():
    assert eigenprojectors([[1.0, 1.0], [0.0, 1.0]]) is None


def test_schur_parlett_close_eigenvalues_matches_expm():
    # a tight cluster forces the blocked path; compare with scipy's expm
    M = np.array([[1.0, 5.0, 0.0], [0.0, 1.0 + 1e-9, 3.0], [0.0, 0.0, 2.5]])
    assert_allclose(matfun(M, ExpScaled()), scipy.linalg.expm(M), rtol=1e-10)


matrices = st.integers(min_value=1, max_value=4).flatmap(
    lambda r: st.lists(st.floats(-2, 2), min_size=r * r, max_size=r * r).map(lambda v: np.array(v).reshape(r, r))
)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_exp_matches_expm(M):
    assert_allclose(matfun(M, ExpScaled()), scipy.linalg.expm(M), rtol=1e-9, atol=1e-9 * max(1.0, fro_norm(scipy.linalg.expm(M))))


@settings(max_examples=60, deadline=None)
@given(matrices, st.floats(0.1, 5.0))
def test_matpow_matches_expm_log(M, t):
    want = scipy.linalg.expm(math.log(t) * M)
    assert_allclose(matpow_base(t, M), want, rtol=1e-9, atol=1e-9 * max(1.0, fro_norm(want)))


@settings(max_examples=40, deadline=None)
@given(matrices, st.integers(0, 2**32 - 1))
def test_similarity_invariance(M, seed):
    r = M.shape[0]
    S = np.eye(r) + 0.3 * np.random.default_rng(seed).standard_normal((r, r))
    Si = np.linalg.inv(S)
    lhs = matfun(S @ M @ Si, ExpScaled(0.5))
    rhs = S @ matfun(M, ExpScaled(0.5)) @ Si
    assert_allclose(lhs, rhs, atol=1e-8 * max(1.0, fro_norm(rhs)) * np.linalg.cond(S))
