import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fldabound.kernels import (
    EmptyBasisError,
    NotPositiveDefiniteError,
    check_positive_definite,
    orthonormal_range,
    solve_spd,
    sqrt_spd,
    sym_eig,
)

from conftest import random_spd

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_identity_eig():
    e = sym_eig(np.eye(3))
    np.testing.assert_array_equal(e.eigenvalues, [1, 1, 1])
    np.testing.assert_allclose(np.abs(e.eigenvectors) @ np.ones(3), np.ones(3))
    np.testing.assert_allclose(e.eigenvectors.T @ e.eigenvectors, np.eye(3), atol=1e-12)


def test_diagonal_eig_descending():
    e = sym_eig(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(e.eigenvalues, [3, 2, 1])
    np.testing.assert_allclose(e.eigenvectors, np.eye(3)[:, [0, 2, 1]], atol=1e-15)


def test_random_eig_reconstruction(rng):
    b = rng.standard_normal((10, 10))
    a = b + b.T
    e = sym_eig(a)
    q, w = e.eigenvectors, e.eigenvalues
    assert np.max(np.abs(q @ np.diag(w) @ q.T - a)) <= 1e-8 * (1 + np.max(np.abs(a)))
    assert np.max(np.abs(q.T @ q - np.eye(10))) <= 1e-10
    assert np.all(np.diff(w) <= 0)


@settings(max_examples=50, deadline=None)
@given(arrays(float, (5, 5), elements=finite))
def test_eig_invariants(b):
    a = b + b.T
    e = sym_eig(a)
    tr = np.trace(a)
    assert abs(e.eigenvalues.sum() - tr) <= 1e-8 * (1 + abs(tr))
    assert np.all(np.diff(e.eigenvalues) <= 0)
    # canonical sign: largest-magnitude entry of each column is positive
    q = e.eigenvectors
    assert np.all(q[np.argmax(np.abs(q), axis=0), np.arange(5)] > 0)


def test_sign_convention_is_deterministic(rng):
    b = rng.standard_normal((6, 6))
    a = b @ b.T
    e1, e2 = sym_eig(a), sym_eig(a.copy())
    np.testing.assert_array_equal(e1.eigenvectors, e2.eigenvectors)


@pytest.mark.parametrize(
    "bad",
    [np.ones((2, 3)), np.array([[1.0, np.nan], [np.nan, 1.0]]), np.array([[1.0, 2.0], [0.0, 1.0]])],
    ids=["non-square", "non-finite", "asymmetric"],
)
def test_eig_rejects(bad):
    with pytest.raises(ValueError):
        sym_eig(bad)


def test_range_rank_one():
    r = orthonormal_range(np.array([[1.0, 1.0], [0.0, 0.0], [0.0, 0.0]]))
    assert r.shape == (3, 1)
    np.testing.assert_allclose(np.abs(r[:, 0]), [1, 0, 0])


def test_range_identity_projector():
    r = orthonormal_range(np.eye(4))
    np.testing.assert_allclose(r @ r.T, np.eye(4), atol=1e-12)


def test_range_projector_matches_normal_equations(rng):
    a = rng.standard_normal((6, 3))
    r = orthonormal_range(a)
    oracle = a @ np.linalg.inv(a.T @ a) @ a.T
    np.testing.assert_allclose(r @ r.T, oracle, atol=1e-8)


@settings(max_examples=50, deadline=None)
@given(arrays(float, (6, 3), elements=finite))
def test_range_properties(a):
    if np.max(np.abs(a)) < 1e-6:
        with pytest.raises(EmptyBasisError):
            orthonormal_range(np.zeros((6, 3)))
        return
    r = orthonormal_range(a)
    p = r @ r.T
    np.testing.assert_allclose(r.T @ r, np.eye(r.shape[1]), atol=1e-10)
    np.testing.assert_allclose(p @ p, p, atol=1e-8)
    assert np.max(np.abs(p @ a - a)) <= 1e-8 * np.max(np.abs(a))


def test_range_of_zero_is_error():
    with pytest.raises(EmptyBasisError):
        orthonormal_range(np.zeros((3, 2)))


def test_solve_trivial():
    b = np.arange(6.0).reshape(3, 2)
    np.testing.assert_allclose(solve_spd(np.eye(3), b), b)
    np.testing.assert_allclose(solve_spd(2 * np.eye(3), np.array([1.0, 0, 0])), [0.5, 0, 0])


def test_solve_residual(rng):
    a = random_spd(rng, 8)
    b = rng.standard_normal((8, 3))
    x = solve_spd(a, b)
    assert np.max(np.abs(a @ x - b)) <= 1e-8 * (1 + np.max(np.abs(b)))


def test_solve_rejects_singular():
    with pytest.raises(NotPositiveDefiniteError):
        solve_spd(np.diag([1.0, 0.0]), np.ones(2))
    with pytest.raises(NotPositiveDefiniteError):
        check_positive_definite(np.diag([1.0, 1e-12]))


def test_sqrt_spd(rng):
    a = random_spd(rng, 5)
    r = sqrt_spd(a)
    np.testing.assert_allclose(r @ r, a, atol=1e-12)
    np.testing.assert_allclose(r, r.T)
