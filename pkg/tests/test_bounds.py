import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from fldabound.bounds import (
    covariance_only_approx,
    error_upper_bound,
    normal_cdf,
    normal_quantile,
    power_bound_curve,
    power_lower_bound,
    subspace_overlap_bound,
    varrho,
)

lams = st.floats(0, 1e4, allow_nan=False)
gammas = st.floats(0, 0.99, allow_nan=False)


def test_power_bound_values():
    assert power_lower_bound(3.7, 0.0) == 3.7
    assert power_lower_bound(0.5, 0.5) == pytest.approx(0.0, abs=1e-15)
    assert power_lower_bound(1.0, 0.5) == pytest.approx(0.02859, abs=1e-4)


def test_power_bound_trig_oracle():
    # direct evaluation of the angle-sum formula
    for lam, g in [(1.0, 0.5), (2.5, 0.3), (10.0, 0.9), (0.2, 0.1)]:
        a = math.acos(math.sqrt(lam / (lam + g))) + math.acos(math.sqrt(1 - g))
        assert power_lower_bound(lam, g) == pytest.approx(max(math.cos(a), 0) ** 2 * lam, abs=1e-14)


def test_covariance_only_approx():
    assert covariance_only_approx(5.0, 0.0) == 5.0
    assert covariance_only_approx(4.0, 0.5) == 2.0
    ratio = power_lower_bound(1e6, 0.5) / covariance_only_approx(1e6, 0.5)
    assert 0.99 <= ratio <= 1.0


def test_varrho_values():
    assert varrho(3.0, 0.0) == 1.0
    assert varrho(0.5, 0.5) == pytest.approx(0.0, abs=1e-15)
    assert varrho(1.0, 0.5) == pytest.approx(0.16910, abs=1e-4)


def test_overlap_bound_values():
    assert subspace_overlap_bound(2.0, 0.0) == 1.0
    assert subspace_overlap_bound(1.0, 0.5) == pytest.approx(2 / 3)
    assert subspace_overlap_bound(0.0, 0.3) == 0.0


@pytest.mark.parametrize("fn", [power_lower_bound, varrho, subspace_overlap_bound, covariance_only_approx])
def test_gamma_and_lambda_domain(fn):
    with pytest.raises(ValueError):
        fn(1.0, 1.0)
    with pytest.raises(ValueError):
        fn(1.0, -0.1)
    with pytest.raises(ValueError):
        fn(-1.0, 0.5)


@settings(max_examples=200)
@given(lams, gammas)
def test_power_bound_envelope(lam, g):
    b = power_lower_bound(lam, g)
    assert 0.0 <= b <= min(lam, (1 - g) * lam) * (1 + 1e-12) + 1e-300
    assert abs(varrho(lam, g) ** 2 * lam - b) <= 1e-12 * max(1.0, lam)
    assert 0.0 <= subspace_overlap_bound(lam, g) <= 1.0


@settings(max_examples=200)
@given(lams, lams, gammas, gammas)
def test_power_bound_monotone(l1, l2, g1, g2):
    lo, hi = sorted((l1, l2))
    assert power_lower_bound(lo, g1) <= power_lower_bound(hi, g1) + 1e-12 * max(1, hi)
    ga, gb = sorted((g1, g2))
    assert power_lower_bound(l1, gb) <= power_lower_bound(l1, ga) + 1e-12 * max(1, l1)


def test_normal_cdf_against_quadrature():
    for x in [-8.0, -3.3, -1.0, 0.0, 0.7, 1.959964, 4.0]:
        tail, _ = integrate.quad(lambda t: math.exp(-t * t / 2) / math.sqrt(2 * math.pi), -np.inf, x, epsabs=1e-14)
        assert abs(normal_cdf(x) - tail) <= 1e-10
    assert normal_cdf(0.0) == 0.5
    assert normal_cdf(1.959964) == pytest.approx(0.975, abs=1e-6)


@settings(max_examples=300)
@given(st.floats(-37, 37, allow_nan=False))
def test_normal_cdf_against_scipy(x):
    assert abs(normal_cdf(x) - stats.norm.cdf(x)) <= 1e-10


def test_quantile_round_trip_grid():
    for x in np.linspace(-6, 6, 241):
        assert abs(normal_quantile(normal_cdf(x)) - x) <= 1e-8


@settings(max_examples=300)
@given(st.floats(1e-300, 1 - 1e-16, exclude_min=True, exclude_max=True))
def test_quantile_inverts_cdf(p):
    assert abs(normal_cdf(normal_quantile(p)) - p) <= 1e-9


def test_quantile_matches_scipy_and_domain():
    for p in [1e-20, 1e-5, 0.025, 0.5, 0.8, 0.999]:
        assert normal_quantile(p) == pytest.approx(stats.norm.ppf(p), rel=1e-9, abs=1e-12)
    for p in [0.0, 1.0, -0.1, math.nan]:
        with pytest.raises(ValueError):
            normal_quantile(p)


def test_error_bound_values():
    assert error_upper_bound(0.5, 0.5) == 0.5
    assert error_upper_bound(0.01, 0.0) == 0.01
    assert error_upper_bound(0.158655, 0.5) == pytest.approx(stats.norm.cdf(-0.16910), abs=1e-3)
    assert error_upper_bound(0.158655, 0.5) == pytest.approx(0.4329, abs=1e-3)
    # varrho == 0 at lambda = gamma = 0.5 gives 0.5
    assert error_upper_bound(normal_cdf(-math.sqrt(0.5)), 0.5) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("p", [0.0, 0.51, -1.0])
def test_error_bound_domain(p):
    with pytest.raises(ValueError):
        error_upper_bound(p, 0.3)


@settings(max_examples=200)
@given(st.floats(1e-12, 0.5), st.floats(1e-12, 0.5), gammas, gammas)
def test_error_bound_monotone_and_bracketed(p1, p2, g1, g2):
    for p in (p1, p2):
        for g in (g1, g2):
            e = error_upper_bound(p, g)
            assert p - 1e-10 <= e <= 0.5
    lo, hi = sorted((p1, p2))
    assert error_upper_bound(lo, g1) <= error_upper_bound(hi, g1) + 1e-12
    ga, gb = sorted((g1, g2))
    assert error_upper_bound(p1, ga) <= error_upper_bound(p1, gb) + 1e-12


def test_curve():
    grid = np.linspace(0.1, 10, 50)
    c = power_bound_curve(grid, 0.4)
    assert np.all(np.diff(c.values) >= 0)
    assert np.all((c.values >= 0) & (c.values <= grid))
    with pytest.raises(ValueError):
        power_bound_curve([1.0, 0.5], 0.4)
    with pytest.raises(ValueError):
        power_bound_curve([0.0, 1.0], 0.4)
