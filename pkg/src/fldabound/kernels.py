"""Dense symmetric matrix primitives shared by the rest of the package.

Everything here works on plain ``numpy.ndarray`` values.  The LAPACK
routines behind :func:`numpy.linalg.eigh` and :func:`numpy.linalg.svd` do
the heavy lifting; this module adds the input validation, ordering, sign
and tolerance conventions the other modules depend on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Relative threshold below which a symmetric matrix is not positive definite.
PD_TOL = 1e-10
#: Relative singular-value threshold used to decide numerical rank.
RANK_TOL = 1e-9
#: Relative asymmetry tolerated before symmetrization.
SYM_TOL = 1e-10


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """Raised when a matrix fails the relative positive-definiteness test."""


class EmptyBasisError(ValueError):
    """Raised when a range basis is requested for a numerically zero matrix."""


class ConvergenceError(np.linalg.LinAlgError):
    """Raised when the underlying eigensolver does not converge."""


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite 2-D float array or raise ``ValueError``."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def _check_symmetric(a: np.ndarray, name: str) -> np.ndarray:
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    scale = 1.0 + np.max(np.abs(a))
    if np.max(np.abs(a - a.T)) > SYM_TOL * scale:
        raise ValueError(f"{name} is not symmetric")
    return 0.5 * (a + a.T)


@dataclass(frozen=True, eq=False)
class SymEig:
    """Eigendecomposition ``A = Q diag(w) Q^T`` with ``w`` sorted descending.

    Attributes
    ----------
    eigenvalues : ndarray, shape (D,)
        Non-increasing eigenvalues.
    eigenvectors : ndarray, shape (D, D)
        Orthonormal columns paired with ``eigenvalues``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def canonical_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so the largest-magnitude entry of each is positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def sym_eig(a) -> SymEig:
    """Symmetric eigendecomposition in descending order with canonical signs.

    The input is symmetrized as ``(a + a.T) / 2`` after checking that the
    asymmetry is within ``SYM_TOL`` relative to ``1 + max|a|``.  Equal
    eigenvalues keep the order the solver returned them in.
    """
    a = _check_symmetric(as_matrix(a), "matrix")
    try:
        w, q = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc
    order = np.argsort(-w, kind="stable")
    return SymEig(w[order], canonical_signs(q[:, order]))


def orthonormal_range(a, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the column space of ``a``.

    Numerical rank is the number of singular values exceeding
    ``rank_tol * sigma_max``.
    """
    a = as_matrix(a)
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        raise EmptyBasisError("matrix is numerically zero; its range is empty")
    rank = int(np.sum(s > rank_tol * s[0]))
    return u[:, :rank]


def check_positive_definite(a, name: str = "matrix") -> np.ndarray:
    """Return the eigenvalues of symmetric ``a``, raising if it is not PD.

    Positive definite means ``min eig > PD_TOL * max eig`` and ``max eig > 0``.
    """
    a = _check_symmetric(as_matrix(a, name), name)
    w = np.linalg.eigvalsh(a)
    if w[-1] <= 0 or w[0] <= PD_TOL * w[-1]:
        raise NotPositiveDefiniteError(
            f"{name} is not positive definite (eigenvalue range [{w[0]:.3g}, {w[-1]:.3g}])"
        )
    return w


def solve_spd(a, b) -> np.ndarray:
    """Solve ``a x = b`` for symmetric positive definite ``a``."""
    a = _check_symmetric(as_matrix(a), "matrix")
    b_arr = np.asarray(b, dtype=float)
    vector = b_arr.ndim == 1
    b2 = as_matrix(b_arr[:, None] if vector else b_arr, "right-hand side")
    if b2.shape[0] != a.shape[0]:
        raise ValueError(f"shape mismatch: {a.shape} and {b2.shape}")
    check_positive_definite(a)
    chol = np.linalg.cholesky(a)
    y = np.linalg.solve(chol, b2)
    x = np.linalg.solve(chol.T, y)
    return x[:, 0] if vector else x


def sqrt_spd(a) -> np.ndarray:
    """Symmetric square root of a positive definite matrix."""
    eig = sym_eig(a)
    if eig.eigenvalues[-1] <= PD_TOL * eig.eigenvalues[0]:
        raise NotPositiveDefiniteError("matrix is not positive definite")
    q = eig.eigenvectors
    return (q * np.sqrt(eig.eigenvalues)) @ q.T
