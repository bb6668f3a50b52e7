"""Homoscedastic Gaussian class populations and their sample estimates."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._random import derive_rng
from .kernels import as_matrix, check_positive_definite, sqrt_spd


def between_scatter(means) -> np.ndarray:
    """Between-class scatter of equally weighted class means.

    ``S = (1/K) sum_i (mu_i - mu_bar)(mu_i - mu_bar)^T`` where ``K`` is the
    number of means and ``mu_bar`` their unweighted average.

    Parameters
    ----------
    means : array_like, shape (K, D)
        One class mean per row.
    """
    m = np.asarray(means, dtype=float)
    if m.ndim != 2:
        raise ValueError("means must be a sequence of equal-length vectors")
    if m.shape[0] < 2:
        raise ValueError("need at least two class means")
    centered = m - m.mean(axis=0)
    s = centered.T @ centered / m.shape[0]
    return 0.5 * (s + s.T)


@dataclass(frozen=True, eq=False)
class HomoscedasticGaussianProblem:
    """``class_count`` Gaussian classes ``N(mu_i, Sigma)`` with uniform priors.

    Attributes
    ----------
    means : ndarray, shape (class_count, D)
    covariance : ndarray, shape (D, D)
    """

    means: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        means = np.array(self.means, dtype=float)
        cov = as_matrix(self.covariance, "covariance").copy()
        if means.ndim != 2 or means.shape[0] < 2:
            raise ValueError("need at least two class means of equal length")
        if cov.shape != (means.shape[1], means.shape[1]):
            raise ValueError(
                f"covariance shape {cov.shape} does not match dimension {means.shape[1]}"
            )
        check_positive_definite(cov, "covariance")
        means.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "covariance", cov)

    @property
    def dimension(self) -> int:
        return self.means.shape[1]

    @property
    def class_count(self) -> int:
        return self.means.shape[0]

    @cached_property
    def scatter(self) -> np.ndarray:
        """Population between-class scatter matrix."""
        return between_scatter(self.means)

    @cached_property
    def sqrt_covariance(self) -> np.ndarray:
        return sqrt_spd(self.covariance)


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Examples stored as columns of ``samples`` with dense integer labels.

    Simulated datasets always have the same count per class.  Datasets read
    from disk may not; ``per_class`` is ``None`` for those.
    """

    samples: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        x = as_matrix(self.samples, "samples")
        y = np.asarray(self.labels)
        if y.ndim != 1 or y.shape[0] != x.shape[1]:
            raise ValueError("labels must be a vector with one entry per sample column")
        if not np.issubdtype(y.dtype, np.integer) or (y.size and y.min() < 0):
            raise ValueError("labels must be non-negative integers")
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "labels", y.astype(np.int64))

    @property
    def dimension(self) -> int:
        return self.samples.shape[0]

    @property
    def size(self) -> int:
        return self.samples.shape[1]

    @property
    def class_count(self) -> int:
        return int(self.labels.max()) + 1

    @property
    def class_sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.class_count)

    @property
    def per_class(self) -> int | None:
        sizes = self.class_sizes
        return int(sizes[0]) if np.all(sizes == sizes[0]) else None

    def subset(self, columns) -> "LabeledDataset":
        columns = np.asarray(columns)
        return LabeledDataset(self.samples[:, columns], self.labels[columns])


@dataclass(frozen=True, eq=False)
class ScatterEstimates:
    """Sample covariance (divisor N), between-class scatter, and class means."""

    sample_cov: np.ndarray
    between_scatter: np.ndarray
    class_means: np.ndarray
    grand_mean: np.ndarray
    n_samples: int

    @property
    def dimension(self) -> int:
        return self.sample_cov.shape[0]

    @property
    def class_count(self) -> int:
        return self.class_means.shape[0]


def sample_dataset(problem: HomoscedasticGaussianProblem, n: int, seed: int) -> LabeledDataset:
    """Draw ``n`` examples from every class, ``x = mu_i + Sigma^{1/2} z``.

    Columns are grouped by class: the first ``n`` belong to class 0, and so on.
    """
    if n < 1:
        raise ValueError("need at least one example per class")
    rng = derive_rng(seed, "sample")
    k, d = problem.class_count, problem.dimension
    z = rng.standard_normal((d, k * n))
    labels = np.repeat(np.arange(k), n)
    samples = problem.sqrt_covariance @ z + problem.means[labels].T
    return LabeledDataset(samples, labels)


def estimate_scatters(data: LabeledDataset) -> ScatterEstimates:
    """Pooled within-class covariance and between-class scatter.

    The covariance is ``(1/N) sum_i sum_j (x_ij - xbar_i)(x_ij - xbar_i)^T``;
    the divisor is ``N`` rather than ``N - K``.  The between-class scatter
    weights the class means equally whatever the class sizes.
    """
    x, y = data.samples, data.labels
    k = data.class_count
    sizes = np.bincount(y, minlength=k)
    if np.any(sizes == 0):
        raise ValueError(f"empty class among labels 0..{k - 1}")
    n_total, d = x.shape[1], x.shape[0]
    if n_total <= d:
        warnings.warn(
            f"N={n_total} <= D={d}: the sample covariance is singular",
            RuntimeWarning,
            stacklevel=2,
        )
    means = np.zeros((k, d))
    np.add.at(means, y, x.T)
    means /= sizes[:, None]
    resid = x - means[y].T
    cov = resid @ resid.T / n_total
    cov = 0.5 * (cov + cov.T)
    return ScatterEstimates(
        sample_cov=cov,
        between_scatter=between_scatter(means),
        class_means=means,
        grand_mean=means.mean(axis=0),
        n_samples=n_total,
    )


def random_problem(
    dimension: int, class_count: int, mean_scale: float = 1.0, seed: int = 0
) -> HomoscedasticGaussianProblem:
    """Random problem with ``Sigma = A A^T + 0.1 I`` and Gaussian class means.

    ``A`` has i.i.d. ``N(0, 1/D)`` entries and each mean is drawn from
    ``N(0, mean_scale^2 I)``.
    """
    if class_count < 2:
        raise ValueError("class_count must be at least 2")
    if dimension < class_count:
        raise ValueError("dimension must be at least class_count")
    if mean_scale <= 0:
        raise ValueError("mean_scale must be positive")
    rng = derive_rng(seed, "problem")
    a = rng.standard_normal((dimension, dimension)) / np.sqrt(dimension)
    cov = a @ a.T + 0.1 * np.eye(dimension)
    means = mean_scale * rng.standard_normal((class_count, dimension))
    return HomoscedasticGaussianProblem(means, 0.5 * (cov + cov.T))
