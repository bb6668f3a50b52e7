import warnings

import numpy as np
import pytest

from fldabound.flda import simultaneous_diagonalize
from fldabound.problem import (
    HomoscedasticGaussianProblem,
    LabeledDataset,
    between_scatter,
    estimate_scatters,
    random_problem,
    sample_dataset,
)


def test_scatter_centered_pair():
    mu = np.array([1.0, -2.0, 0.5])
    np.testing.assert_allclose(between_scatter([mu, -mu]), np.outer(mu, mu))


def test_scatter_equal_means_is_zero():
    np.testing.assert_array_equal(between_scatter([np.ones(3)] * 4), np.zeros((3, 3)))


def test_scatter_matches_double_loop(rng):
    means = rng.standard_normal((3, 4))
    bar = means.mean(axis=0)
    oracle = np.zeros((4, 4))
    for m in means:
        for i in range(4):
            for j in range(4):
                oracle[i, j] += (m[i] - bar[i]) * (m[j] - bar[j]) / 3
    s = between_scatter(means)
    np.testing.assert_allclose(s, oracle, atol=1e-12)
    assert abs(np.trace(s) - np.sum((means - bar) ** 2) / 3) <= 1e-10
    assert np.linalg.matrix_rank(s) <= 2


@pytest.mark.parametrize("means", [[np.ones(2)], [np.ones(2), np.ones(3)]])
def test_scatter_rejects(means):
    with pytest.raises(ValueError):
        between_scatter(means)


def test_problem_validation():
    with pytest.raises(ValueError):
        HomoscedasticGaussianProblem(np.zeros((2, 3)), np.eye(2))
    with pytest.raises(np.linalg.LinAlgError):
        HomoscedasticGaussianProblem(np.zeros((2, 2)), np.diag([1.0, 0.0]))


def test_sampling_is_deterministic_and_balanced():
    p = random_problem(6, 3, seed=1)
    a, b = sample_dataset(p, 7, seed=5), sample_dataset(p, 7, seed=5)
    np.testing.assert_array_equal(a.samples, b.samples)
    assert a.samples.shape == (6, 21)
    np.testing.assert_array_equal(np.bincount(a.labels), [7, 7, 7])
    assert a.per_class == 7
    assert not np.array_equal(a.samples, sample_dataset(p, 7, seed=6).samples)


def test_sample_mean_clt():
    p = HomoscedasticGaussianProblem(np.zeros((2, 2)), np.eye(2))
    data = sample_dataset(p, 50_000, seed=0)
    assert np.all(np.abs(data.samples.mean(axis=1)) < 0.02)


def test_sample_covariance_matches_population():
    p = random_problem(4, 2, seed=3)
    est = estimate_scatters(sample_dataset(p, 50_000, seed=1))
    np.testing.assert_allclose(est.sample_cov, p.covariance, atol=0.03)
    np.testing.assert_allclose(est.class_means, p.means, atol=0.03)


def test_estimates_hand_example():
    data = LabeledDataset(np.array([[0.0, 2.0, 3.0, 5.0]]), np.array([0, 0, 1, 1]))
    est = estimate_scatters(data)
    np.testing.assert_allclose(est.class_means.ravel(), [1, 4])
    np.testing.assert_allclose(est.sample_cov, [[1.0]])
    np.testing.assert_allclose(est.between_scatter, [[2.25]])


def test_estimates_zero_covariance_when_points_sit_on_means():
    x = np.repeat(np.array([[1.0, 2.0, 5.0], [0.0, 1.0, -1.0]]), 3, axis=1)
    est = estimate_scatters(LabeledDataset(x, np.repeat([0, 1, 2], 3)))
    np.testing.assert_array_equal(est.sample_cov, np.zeros((2, 2)))


def test_estimates_invariant_to_relabeling():
    p = random_problem(5, 3, seed=2)
    data = sample_dataset(p, 10, seed=2)
    perm = np.array([2, 0, 1])
    relabeled = LabeledDataset(data.samples, perm[data.labels])
    a, b = estimate_scatters(data), estimate_scatters(relabeled)
    np.testing.assert_allclose(a.sample_cov, b.sample_cov, atol=1e-14)
    np.testing.assert_allclose(a.between_scatter, b.between_scatter, atol=1e-14)
    assert np.linalg.matrix_rank(a.between_scatter, tol=1e-9) <= 2


def test_estimates_errors_and_warnings():
    with pytest.raises(ValueError):
        estimate_scatters(LabeledDataset(np.ones((2, 3)), np.array([0, 0, 2])))
    p = random_problem(8, 2, seed=0)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        estimate_scatters(sample_dataset(p, 3, seed=0))
    assert any(issubclass(w.category, RuntimeWarning) for w in caught)


def test_random_problem_properties():
    p = random_problem(12, 4, mean_scale=2.0, seed=9)
    q = random_problem(12, 4, mean_scale=2.0, seed=9)
    np.testing.assert_array_equal(p.covariance, q.covariance)
    np.testing.assert_array_equal(p.means, q.means)
    assert np.linalg.eigvalsh(p.covariance)[0] >= 0.1 - 1e-8
    lam = simultaneous_diagonalize(p.covariance, p.scatter).population_lambdas
    assert np.all(np.isfinite(lam)) and lam.min() >= -1e-10
    assert np.sum(lam > 1e-9 * lam[0]) <= 3


def test_random_problem_validation():
    with pytest.raises(ValueError):
        random_problem(2, 3)
    with pytest.raises(ValueError):
        random_problem(5, 1)
    with pytest.raises(ValueError):
        random_problem(5, 2, mean_scale=0.0)
