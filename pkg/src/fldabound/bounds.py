"""Closed-form asymptotic bounds for FLDA and the Gaussian CDF they need.

``gamma`` throughout is the limiting dimension-to-sample-size ratio D/N and
must lie in ``[0, 1)``.  ``lam`` is a population discrimination power
(a nonzero eigenvalue of ``Sigma^{-1} S``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def check_gamma(gamma: float) -> float:
    """Validate a dimension-to-sample ratio."""
    gamma = float(gamma)
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    return gamma


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not lam >= 0.0:  # also rejects NaN
        raise ValueError(f"discrimination power must be non-negative, got {lam}")
    return lam


def _clip01(x: float) -> float:
    return min(max(x, 0.0), 1.0)


def subspace_overlap_bound(lam: float, gamma: float) -> float:
    """Asymptotic lower bound ``lam / (lam + gamma)`` on ``||V_{1:c}^T e_i||^2``."""
    lam, gamma = _check_lambda(lam), check_gamma(gamma)
    if lam == 0.0:
        return 0.0
    return lam / (lam + gamma)


def _bound_angle(lam: float, gamma: float) -> float:
    # theta_1 + theta_2 in the limit; both arguments clipped so rounding at
    # the boundaries never produces NaN.
    overlap = 1.0 if lam == 0.0 and gamma == 0.0 else subspace_overlap_bound(lam, gamma)
    return math.acos(math.sqrt(_clip01(overlap))) + math.acos(math.sqrt(_clip01(1.0 - gamma)))


def varrho(lam: float, gamma: float) -> float:
    """Shrinkage factor ``max(cos(theta), 0)`` of the Fisher direction.

    ``varrho(lam, gamma)**2 * lam == power_lower_bound(lam, gamma)``.
    """
    lam, gamma = _check_lambda(lam), check_gamma(gamma)
    if gamma == 0.0:
        return 1.0
    return max(math.cos(_bound_angle(lam, gamma)), 0.0)


def power_lower_bound(lam: float, gamma: float) -> float:
    """Asymptotic lower bound on one component ``delta_i * lam_i``.

    Examples
    --------
    >>> power_lower_bound(3.0, 0.0)
    3.0
    >>> round(power_lower_bound(1.0, 0.5), 5)
    0.0286
    """
    rho = varrho(lam, gamma)
    return rho * rho * float(lam)


def covariance_only_approx(lam: float, gamma: float) -> float:
    """Large-``lam`` limit of the bound, ``(1 - gamma) * lam``."""
    lam, gamma = _check_lambda(lam), check_gamma(gamma)
    return (1.0 - gamma) * lam


def normal_cdf(x: float) -> float:
    """Standard normal CDF, computed from the complementary error function.

    ``math.erfc`` keeps full relative precision in the lower tail, so the
    result is accurate well beyond 1e-10 absolute everywhere.
    """
    return 0.5 * math.erfc(-float(x) / _SQRT2)


def normal_pdf(x: float) -> float:
    x = float(x)
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def _lower_tail_guess(q: float) -> float:
    # Abramowitz & Stegun 26.2.23, |error| < 4.5e-4; only a starting point.
    t = math.sqrt(-2.0 * math.log(q))
    num = 2.515517 + t * (0.802853 + t * 0.010328)
    den = 1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308))
    return -(t - num / den)


def _lower_quantile(q: float) -> float:
    """Solve ``normal_cdf(x) = q`` for ``0 < q <= 0.5`` by bracketed Newton."""
    if q == 0.5:
        return 0.0
    lo, hi = -40.0, 0.0
    x = min(max(_lower_tail_guess(q), lo), hi)
    for _ in range(100):
        f = normal_cdf(x) - q
        if f > 0.0:
            hi = x
        elif f < 0.0:
            lo = x
        else:
            return x
        dens = normal_pdf(x)
        step = f / dens if dens > 0.0 else math.inf
        x_new = x - step
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 1e-15 * (1.0 + abs(x)):
            return x_new
        x = x_new
    return x


def normal_quantile(p: float) -> float:
    """Inverse of :func:`normal_cdf` on ``(0, 1)``.

    For ``p > 0.5`` the upper tail ``1 - p`` (exact in floating point) is
    inverted instead, which keeps the round trip tight near the right tail.
    """
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got {p}")
    if p > 0.5:
        return -_lower_quantile(1.0 - p)
    return _lower_quantile(p)


def error_upper_bound(p_bayes: float, gamma: float) -> float:
    """Asymptotic upper bound on the binary FLDA error given the Bayes error.

    ``Phi(varrho * Phi^{-1}(p_bayes))`` with ``lam = Phi^{-1}(p_bayes)**2``.
    """
    p_bayes = float(p_bayes)
    if not 0.0 < p_bayes <= 0.5:
        raise ValueError(f"Bayes error must lie in (0, 0.5], got {p_bayes}")
    gamma = check_gamma(gamma)
    z = normal_quantile(p_bayes)
    if gamma == 0.0:
        return p_bayes
    return normal_cdf(varrho(z * z, gamma) * z)


@dataclass(frozen=True, eq=False)
class BoundCurve:
    """Bound values over a grid of discrimination powers at a fixed ``gamma``."""

    lambda_grid: np.ndarray
    values: np.ndarray
    gamma: float


def power_bound_curve(lambda_grid, gamma: float) -> BoundCurve:
    grid = np.asarray(lambda_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("lambda grid must be positive and strictly increasing")
    gamma = check_gamma(gamma)
    values = np.array([power_lower_bound(lam, gamma) for lam in grid])
    return BoundCurve(grid, values, gamma)
