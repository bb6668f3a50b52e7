"""Marchenko-Pastur law and the random-matrix checks built on it.

The checks here draw the random matrices that appear in the generalization
analysis (normalized Wishart matrices, pooled within-class covariances of
standard Gaussian data, tall Gaussian matrices) and report the statistics
whose limits the analysis relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, interpolate

from ._random import derive_rng
from .bounds import check_gamma

#: Resolution of the cached Marchenko-Pastur CDF table.
CDF_GRID_POINTS = 2048


@dataclass(frozen=True, eq=False)
class SpectralSample:
    """Eigenvalues of a ``D x D`` random matrix, sorted ascending."""

    eigenvalues: np.ndarray
    source_dims: tuple[int, int]

    def __post_init__(self):
        ev = np.sort(np.asarray(self.eigenvalues, dtype=float).ravel())
        if ev.size == 0:
            raise ValueError("spectral sample must contain at least one eigenvalue")
        object.__setattr__(self, "eigenvalues", ev)

    @property
    def size(self) -> int:
        return self.eigenvalues.size


@dataclass(frozen=True)
class MpLaw:
    """Marchenko-Pastur law with ratio ``gamma`` and unit variance."""

    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "gamma", check_gamma(self.gamma))

    @property
    def lower(self) -> float:
        return (1.0 - math.sqrt(self.gamma)) ** 2

    @property
    def upper(self) -> float:
        return (1.0 + math.sqrt(self.gamma)) ** 2

    @property
    def support(self) -> tuple[float, float]:
        return self.lower, self.upper

    @property
    def degenerate(self) -> bool:
        """True at ``gamma == 0``, where the law is a point mass at 1."""
        return self.gamma == 0.0

    def cdf(self, lam):
        return mp_cdf(lam, self)


def mp_density(lam: float, law: MpLaw) -> float:
    """Density ``sqrt((l+ - x)(x - l-)) / (2 pi gamma x)`` on the support, else 0."""
    if law.degenerate:
        raise ValueError("the gamma = 0 law is a point mass at 1 and has no density")
    lo, hi = law.support
    lam = float(lam)
    if lam <= lo or lam >= hi:
        return 0.0
    return math.sqrt((hi - lam) * (lam - lo)) / (2.0 * math.pi * law.gamma * lam)


def _density_moment_quad(law: MpLaw, power: float) -> float:
    # Integral of lam**power against the density.  The algebraic weight
    # (lam - lo)^0.5 (hi - lam)^0.5 absorbs the square-root endpoints.
    lo, hi = law.support
    scale = 1.0 / (2.0 * math.pi * law.gamma)
    value, _ = integrate.quad(
        lambda x: scale * x ** (power - 1.0),
        lo,
        hi,
        weight="alg",
        wvar=(0.5, 0.5),
        epsabs=1e-13,
        epsrel=1e-12,
        limit=200,
    )
    return value


def mp_moment(power: float, law: MpLaw) -> float:
    """``integral lam**power dF_gamma`` by quadrature (1 at ``gamma == 0``)."""
    if law.degenerate:
        return 1.0
    return _density_moment_quad(law, power)


def mp_inverse_moment(order: int, law: MpLaw, method: str = "analytic") -> float:
    """``integral lam**(-order) dF_gamma`` for ``order`` in {1, 2}.

    ``method="analytic"`` returns ``1/(1-gamma)`` or ``1/(1-gamma)**3``;
    ``method="quadrature"`` integrates the density numerically.
    """
    if order not in (1, 2):
        raise ValueError(f"unsupported order {order}; expected 1 or 2")
    if method == "analytic":
        exponent = 1 if order == 1 else 3
        return 1.0 / (1.0 - law.gamma) ** exponent
    if method == "quadrature":
        return mp_moment(-float(order), law)
    raise ValueError(f"unknown method {method!r}")


@lru_cache(maxsize=64)
def _cdf_table(gamma: float) -> tuple[float, float, interpolate.CubicSpline]:
    # Substituting lam = lo + (hi - lo)(1 - cos t)/2 turns the density into a
    # smooth function of t on [0, pi]; integrate it cumulatively on a grid.
    law = MpLaw(gamma)
    lo, hi = law.support
    t = np.linspace(0.0, math.pi, CDF_GRID_POINTS)
    lam = lo + 0.5 * (hi - lo) * (1.0 - np.cos(t))
    half_width_sin = 0.5 * (hi - lo) * np.sin(t)
    integrand = half_width_sin**2 / (2.0 * math.pi * gamma * lam)
    cum = integrate.cumulative_simpson(integrand, x=t, initial=0.0)
    spline = interpolate.CubicSpline(t, cum)
    return lo, hi, spline


def mp_cdf(lam, law: MpLaw):
    """Marchenko-Pastur CDF from a cached quadrature table (one per ``gamma``)."""
    lam_arr = np.asarray(lam, dtype=float)
    if law.degenerate:
        out = (lam_arr >= 1.0).astype(float)
    else:
        lo, hi, spline = _cdf_table(law.gamma)
        u = np.clip((lam_arr - lo) / (hi - lo), 0.0, 1.0)
        t = np.arccos(np.clip(1.0 - 2.0 * u, -1.0, 1.0))
        out = np.clip(spline(t), 0.0, 1.0)
        out = np.where(lam_arr <= lo, 0.0, np.where(lam_arr >= hi, 1.0, out))
    return float(out) if np.ndim(lam) == 0 else out


def esd_eval(sample: SpectralSample, lam: float) -> float:
    """Empirical spectral distribution ``#{eigenvalues <= lam} / D``."""
    return np.searchsorted(sample.eigenvalues, lam, side="right") / sample.size


def ks_distance(sample: SpectralSample, law: MpLaw) -> float:
    """Kolmogorov-Smirnov distance between a spectrum and the MP law.

    Both one-sided gaps are checked at every eigenvalue, which gives the exact
    supremum because the law's CDF is continuous.
    """
    if law.degenerate:
        raise ValueError("KS distance needs gamma in (0, 1)")
    ev = sample.eigenvalues
    d = ev.size
    f = mp_cdf(ev, law)
    above = np.arange(1, d + 1) / d - f
    below = f - np.arange(0, d) / d
    return float(max(above.max(), below.max(), 0.0))


def wishart_spectrum(dimension: int, n_samples: int, seed: int) -> SpectralSample:
    """Eigenvalues of ``G G^T / N`` for a ``D x N`` standard Gaussian ``G``."""
    if dimension < 1 or n_samples < 1:
        raise ValueError("dimension and sample count must be positive")
    g = derive_rng(seed, "wishart").standard_normal((dimension, n_samples))
    return SpectralSample(np.linalg.eigvalsh(g @ g.T / n_samples), (dimension, n_samples))


def _pooled_identity_covariance(dimension: int, n_samples: int, classes: int, rng) -> np.ndarray:
    if classes < 1 or n_samples % classes:
        raise ValueError("n_samples must be a positive multiple of classes")
    per_class = n_samples // classes
    z = rng.standard_normal((classes, dimension, per_class))
    z -= z.mean(axis=2, keepdims=True)
    cov = np.zeros((dimension, dimension))
    for block in z:
        cov += block @ block.T
    return cov / n_samples


def pooled_covariance_spectrum(
    dimension: int, n_samples: int, classes: int, seed: int
) -> SpectralSample:
    """Spectrum of the pooled within-class covariance of ``N(mu_i, I)`` data.

    This is the normalized covariance estimate of the analysis: a Wishart
    matrix minus a rank-``classes`` correction for the estimated means.
    """
    rng = derive_rng(seed, "pooled")
    cov = _pooled_identity_covariance(dimension, n_samples, classes, rng)
    return SpectralSample(np.linalg.eigvalsh(cov), (dimension, n_samples))


def extreme_singular_check(dimension: int, m: int, seed: int) -> tuple[float, float]:
    """``(sigma_max, sigma_min) / sqrt(D)`` of a ``D x m`` standard Gaussian matrix."""
    if not 1 <= m <= dimension:
        raise ValueError("need 1 <= m <= dimension")
    g = derive_rng(seed, "singular").standard_normal((dimension, m))
    s = np.linalg.svd(g, compute_uv=False)
    root = math.sqrt(dimension)
    return float(s[0] / root), float(s[-1] / root)


def quadratic_form_check(
    dimension: int, n_samples: int, classes: int, seed: int
) -> tuple[float, float]:
    """Realized ``xi^T L^{-1} xi`` and ``xi^T L^{-2} xi`` for a uniform unit ``xi``.

    ``L`` is the diagonal eigenvalue matrix of the pooled within-class
    covariance of standard Gaussian data with ``classes`` equal classes.
    """
    if n_samples <= dimension:
        raise ValueError("need n_samples > dimension")
    cov = _pooled_identity_covariance(dimension, n_samples, classes, derive_rng(seed, "pooled"))
    ev = np.linalg.eigvalsh(cov)
    if ev[0] <= 0.0:
        raise np.linalg.LinAlgError("realized covariance is singular")
    xi = derive_rng(seed, "direction").standard_normal(dimension)
    xi /= np.linalg.norm(xi)
    inv = 1.0 / ev
    return float(np.sum(xi * xi * inv)), float(np.sum(xi * xi * inv * inv))
