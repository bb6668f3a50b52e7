"""Fisher's linear discriminant: fitting, discrimination power, and its
per-component factorization into population powers and attenuation factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import normal_cdf
from .kernels import (
    RANK_TOL,
    NotPositiveDefiniteError,
    as_matrix,
    check_positive_definite,
    orthonormal_range,
    sym_eig,
)
from .problem import HomoscedasticGaussianProblem, ScatterEstimates


@dataclass(frozen=True, eq=False)
class SimDiag:
    """Nonsingular ``transform`` with ``X^T Sigma X = I`` and ``X^T S X = diag(lambdas)``."""

    transform: np.ndarray
    population_lambdas: np.ndarray

    def rank(self, rank_tol: float = RANK_TOL) -> int:
        """Number of eigenvalues above ``rank_tol`` times the largest."""
        lam = self.population_lambdas
        if lam.size == 0 or lam[0] <= 0:
            return 0
        return int(np.sum(lam > rank_tol * lam[0]))


@dataclass(frozen=True, eq=False)
class FldaModel:
    """Fitted projection, scaled so that ``W^T Sigma_hat W = I_c``."""

    projection: np.ndarray
    emp_eigenvalues: np.ndarray

    @property
    def n_components(self) -> int:
        return self.projection.shape[1]

    def transform(self, x) -> np.ndarray:
        """Project the columns of ``x`` onto the discriminant directions."""
        return self.projection.T @ np.asarray(x, dtype=float)


@dataclass(frozen=True, eq=False)
class DeltaFactors:
    """Attenuation factors of the population discrimination powers.

    Attributes
    ----------
    deltas : ndarray, shape (c,)
        ``delta_i`` in ``[0, 1]`` such that the generalization power is
        ``sum(deltas * lambdas)``.
    lambdas : ndarray, shape (c,)
        Nonzero population powers, descending.
    theta1 : ndarray, shape (c,)
        Angle between ``e_i`` and the top-``c`` eigenspace of the normalized
        between-class scatter estimate.
    theta2 : ndarray, shape (c,)
        Angle between ``xi`` and ``Lambda^{-1} xi``, where ``xi`` is the
        normalized projection of ``e_i`` on that eigenspace, rotated into the
        eigenbasis of the normalized covariance estimate.
    """

    deltas: np.ndarray
    lambdas: np.ndarray
    theta1: np.ndarray
    theta2: np.ndarray

    @property
    def powers(self) -> np.ndarray:
        return self.deltas * self.lambdas

    def angle_bounds(self) -> np.ndarray:
        """``max(cos(theta1 + theta2), 0)**2`` per component."""
        return np.maximum(np.cos(self.theta1 + self.theta2), 0.0) ** 2


def simultaneous_diagonalize(sigma, s) -> SimDiag:
    """Whiten by ``sigma``, then diagonalize the whitened ``s``.

    ``X = Q_sigma Lambda_sigma^{-1/2} P`` where ``P`` holds the eigenvectors
    of ``X_0^T s X_0``.  Eigenvalues come out in descending order.
    """
    sigma = as_matrix(sigma, "sigma")
    s = as_matrix(s, "s")
    if sigma.shape != s.shape:
        raise ValueError(f"shape mismatch: {sigma.shape} and {s.shape}")
    check_positive_definite(sigma, "sigma")
    whiten = sym_eig(sigma)
    x0 = whiten.eigenvectors / np.sqrt(whiten.eigenvalues)
    inner = x0.T @ s @ x0
    rot = sym_eig(0.5 * (inner + inner.T))
    return SimDiag(x0 @ rot.eigenvectors, rot.eigenvalues)


def fit_flda(est: ScatterEstimates, c: int | None = None) -> FldaModel:
    """Top-``c`` generalized eigenvectors of ``(S_hat, Sigma_hat)``.

    ``c`` defaults to ``class_count - 1``.
    """
    k = est.class_count
    if c is None:
        c = k - 1
    if not 1 <= c <= k - 1:
        raise ValueError(f"c must be in [1, {k - 1}], got {c}")
    try:
        sd = simultaneous_diagonalize(est.sample_cov, est.between_scatter)
    except NotPositiveDefiniteError as exc:
        raise NotPositiveDefiniteError(f"sample covariance is singular: {exc}") from exc
    lam = np.maximum(sd.population_lambdas[:c], 0.0)
    return FldaModel(sd.transform[:, :c], lam)


def discrimination_power(sigma, s, w) -> float:
    """Fisher criterion ``Tr((W^T Sigma W)^{-1} W^T S W)``."""
    sigma = as_matrix(sigma, "sigma")
    s = as_matrix(s, "s")
    w = np.asarray(w, dtype=float)
    if w.ndim == 1:
        w = w[:, None]
    w = as_matrix(w, "w")
    within = w.T @ sigma @ w
    within = 0.5 * (within + within.T)
    try:
        check_positive_definite(within, "projected covariance")
    except NotPositiveDefiniteError as exc:
        raise NotPositiveDefiniteError(f"degenerate projection: {exc}") from exc
    between = w.T @ s @ w
    value = float(np.trace(np.linalg.solve(within, between)))
    return max(value, 0.0)


def delta_factors(
    problem: HomoscedasticGaussianProblem,
    est: ScatterEstimates,
    rank_tol: float = RANK_TOL,
) -> DeltaFactors:
    """Attenuation factors of the fitted FLDA projection, plus angle diagnostics.

    With ``X`` diagonalizing the population pair, the estimates are moved to
    the normalized frame ``Sigma_0 = X^T Sigma_hat X``, ``S_0 = X^T S_hat X``.
    Writing ``Sigma_0 = U L U^T`` and ``V_c`` for the top ``c`` eigenvectors
    of ``S_0``::

        delta_i = || R^T U^T e_i ||^2,   R = range(L^{-1} U^T V_c)
    """
    sd = simultaneous_diagonalize(problem.covariance, problem.scatter)
    c = sd.rank(rank_tol)
    if c == 0:
        raise ValueError("population scatter has no nonzero discrimination power")
    x = sd.transform
    sigma0 = x.T @ est.sample_cov @ x
    s0 = x.T @ est.between_scatter @ x
    cov_eig = sym_eig(0.5 * (sigma0 + sigma0.T))
    check_positive_definite(sigma0, "normalized sample covariance")
    u, ell = cov_eig.eigenvectors, cov_eig.eigenvalues
    v = sym_eig(0.5 * (s0 + s0.T)).eigenvectors[:, :c]

    r = orthonormal_range((u.T @ v) / ell[:, None], rank_tol)
    deltas = np.sum((u[:c] @ r) ** 2, axis=1)

    overlap = np.linalg.norm(v[:c], axis=1)
    theta1 = np.arccos(np.clip(overlap, 0.0, 1.0))
    theta2 = np.zeros(c)
    for i in range(c):
        zeta = v @ v[i]
        norm = np.linalg.norm(zeta)
        if norm == 0.0:
            continue
        xi = u.T @ (zeta / norm)
        q1 = float(np.sum(xi * xi / ell))
        q2 = float(np.sum(xi * xi / ell**2))
        theta2[i] = math.acos(min(max(q1 / math.sqrt(q2), 0.0), 1.0))

    return DeltaFactors(
        deltas=deltas,
        lambdas=sd.population_lambdas[:c].copy(),
        theta1=theta1,
        theta2=theta2,
    )


def generalization_error(w1, mu_hat1, mu_hat2, mu1, mu2, sigma) -> float:
    """Exact error of the binary FLDA rule under the true Gaussian classes.

    The rule thresholds ``w1^T x`` at the midpoint of the projected sample
    means.  ``w1`` is negated first if it points from class 2 towards
    class 1, so that class 1 always lies on the positive side.
    """
    w1 = np.asarray(w1, dtype=float).ravel()
    mu_hat1, mu_hat2, mu1, mu2 = (
        np.asarray(v, dtype=float).ravel() for v in (mu_hat1, mu_hat2, mu1, mu2)
    )
    sigma = as_matrix(sigma, "sigma")
    spread_sq = float(w1 @ sigma @ w1)
    if not spread_sq > 0.0:
        raise ValueError("projection vector has zero variance under sigma")
    if w1 @ (mu1 - mu2) < 0:
        w1 = -w1
    spread = math.sqrt(spread_sq)
    threshold = 0.5 * float(w1 @ (mu_hat1 + mu_hat2))
    miss1 = normal_cdf(-(float(w1 @ mu1) - threshold) / spread)
    miss2 = normal_cdf(-(threshold - float(w1 @ mu2)) / spread)
    return 0.5 * miss1 + 0.5 * miss2


def bayes_error(lambda1: float) -> float:
    """Bayes error ``Phi(-sqrt(lambda1))`` of two equiprobable classes."""
    lambda1 = float(lambda1)
    if not lambda1 >= 0.0:
        raise ValueError(f"lambda1 must be non-negative, got {lambda1}")
    return normal_cdf(-math.sqrt(lambda1))
