import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from raschclust.data import ResponseMatrix
from raschclust.errors import ConfigError, DataError, DegenerateItemError
from raschclust.estimation import (FitConfig, QuadratureRule, fit_mml,
                                   gauss_hermite_rule, irf,
                                   log_marginal_likelihood)
from raschclust.simulate import gen_rasch

from conftest import random_binary


# ---------------------------------------------------------------- irf

def test_irf_examples():
    assert irf(0.0, 0.0) == pytest.approx(0.5)
    assert irf(math.log(3), 0.0) == pytest.approx(0.75)
    assert irf(0.0, math.log(3)) == pytest.approx(0.25)
    # equal shifts cancel
    assert irf(2.7, 2.7) == pytest.approx(0.5)


def test_irf_monotone_in_theta():
    thetas = np.linspace(-5, 5, 41)
    vals = [irf(t, 0.3) for t in thetas]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert all(0 < v < 1 for v in vals)


def test_irf_rejects_nonfinite():
    with pytest.raises(DataError):
        irf(float("nan"), 0.0)
    with pytest.raises(DataError):
        irf(0.0, float("inf"))


# ------------------------------------------------------ quadrature rule

def test_gh_rule_n1_is_point_mass_at_zero():
    rule = gauss_hermite_rule(1)
    assert rule.nodes == pytest.approx([0.0])
    assert rule.weights == pytest.approx([1.0])


@pytest.mark.parametrize("n", [2, 5, 30, 200])
def test_gh_rule_matches_normal_moments(n):
    rule = gauss_hermite_rule(n)
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert (rule.weights * rule.nodes).sum() == pytest.approx(0.0, abs=1e-12)
    if n >= 2:
        assert (rule.weights * rule.nodes ** 2).sum() == pytest.approx(1.0)
    if n >= 3:
        assert (rule.weights * rule.nodes ** 4).sum() == pytest.approx(3.0)


@pytest.mark.parametrize("n", [0, -1, 201, 2.5, "8"])
def test_gh_rule_rejects_bad_sizes(n):
    with pytest.raises(ConfigError):
        gauss_hermite_rule(n)


def test_quadrature_rule_validation():
    with pytest.raises(ConfigError, match="increasing"):
        QuadratureRule(np.array([0.0, 0.0]), np.array([0.5, 0.5]))
    with pytest.raises(ConfigError, match="positive"):
        QuadratureRule(np.array([-1.0, 1.0]), np.array([1.5, -0.5]))
    with pytest.raises(ConfigError, match="sum to 1"):
        QuadratureRule(np.array([-1.0, 1.0]), np.array([0.6, 0.6]))


# -------------------------------------- marginal likelihood vs brute force

def _brute_force_ll(data, delta, sigma, lo=-12.0, hi=12.0, n=200001):
    """Trapezoid integration of the marginal likelihood per person."""
    theta = np.linspace(lo * sigma, hi * sigma, n)
    dens = np.exp(-0.5 * (theta / sigma) ** 2) / (sigma * np.sqrt(2 * np.pi))
    p = 1.0 / (1.0 + np.exp(-(theta[None, :] - np.asarray(delta)[:, None])))
    total = 0.0
    for row in data.values:
        lik = np.prod(np.where(row[:, None] == 1, p, 1 - p), axis=0)
        total += np.log(np.trapezoid(lik * dens, theta))
    return total


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_loglik_matches_brute_force_integration(seed):
    rng = np.random.default_rng(seed)
    P = int(rng.integers(5, 21))
    I = int(rng.integers(2, 5))
    data = random_binary(rng, P, I)
    delta = rng.normal(0, 1.5, size=I)
    sigma = float(rng.uniform(0.3, 3.0))
    got = log_marginal_likelihood(data, delta, sigma, gauss_hermite_rule(40))
    want = _brute_force_ll(data, delta, sigma)
    assert got == pytest.approx(want, rel=1e-6)


def test_loglik_tiny_sigma_factorizes():
    # as sigma -> 0 the marginal collapses to independent coin flips
    data = ResponseMatrix(np.array([[0, 1], [1, 0]]))
    ll = log_marginal_likelihood(data, [0.0, 0.0], 1e-6, gauss_hermite_rule(30))
    assert ll == pytest.approx(4 * math.log(0.5), rel=1e-9)


def test_loglik_input_validation(rasch6):
    rule = gauss_hermite_rule(10)
    with pytest.raises(DataError, match="difficulties"):
        log_marginal_likelihood(rasch6, [0.0], 1.0, rule)
    with pytest.raises(DataError, match="sigma"):
        log_marginal_likelihood(rasch6, np.zeros(6), 0.0, rule)


# ------------------------------------------------------------- fit_mml

def test_fit_rejects_constant_column():
    values = np.array([[0, 1], [0, 0], [0, 1]])
    with pytest.raises(DegenerateItemError, match="constant item column"):
        fit_mml(ResponseMatrix(values, ("bad", "ok")))


def test_fit_trace_is_monotone(rasch6):
    fit = fit_mml(rasch6)
    assert fit.converged
    diffs = np.diff(fit.loglik_trace)
    assert (diffs > -1e-9).all()
    assert fit.log_marginal_likelihood == pytest.approx(fit.loglik_trace[-1])


def test_fit_loglik_consistent_with_standalone(rasch6):
    config = FitConfig(quad_points=21)
    fit = fit_mml(rasch6, config)
    want = log_marginal_likelihood(rasch6, fit.difficulties, fit.sigma_theta,
                                   gauss_hermite_rule(21))
    assert fit.log_marginal_likelihood == pytest.approx(want, rel=1e-12)


def test_fit_is_a_local_maximum(rasch6):
    """Oracle: perturbing any fitted parameter cannot raise the likelihood."""
    config = FitConfig(quad_points=21, tol=1e-8)
    fit = fit_mml(rasch6, config)
    rule = gauss_hermite_rule(21)
    base = log_marginal_likelihood(rasch6, fit.difficulties, fit.sigma_theta,
                                   rule)
    for i in range(rasch6.item_count):
        for eps in (-0.05, 0.05):
            d = fit.difficulties.copy()
            d[i] += eps
            assert log_marginal_likelihood(rasch6, d, fit.sigma_theta,
                                           rule) <= base + 1e-9
    for eps in (-0.05, 0.05):
        assert log_marginal_likelihood(rasch6, fit.difficulties,
                                       fit.sigma_theta + eps,
                                       rule) <= base + 1e-9


def test_fit_recovers_generating_parameters(rasch6):
    fit = fit_mml(rasch6)
    true = np.array([0.0, -1.5, -1.0, 0.5, 1.2, 1.5])
    assert abs(fit.sigma_theta - 1.0) < 0.35
    assert np.abs(fit.difficulties - true).max() < 0.6


def test_fit_person_permutation_invariant(rasch6):
    rng = np.random.default_rng(9)
    shuffled = rasch6.take_persons(rng.permutation(rasch6.person_count))
    a, b = fit_mml(rasch6), fit_mml(shuffled)
    assert a.sigma_theta == b.sigma_theta
    assert (a.difficulties == b.difficulties).all()


def test_fit_item_permutation_equivariant(rasch6):
    perm = [3, 0, 5, 1, 4, 2]
    permuted = rasch6.restrict(perm)
    a, b = fit_mml(rasch6), fit_mml(permuted)
    assert b.sigma_theta == pytest.approx(a.sigma_theta, abs=1e-9)
    assert b.difficulties == pytest.approx(a.difficulties[perm], abs=1e-7)
    assert b.item_labels == tuple(rasch6.item_labels[i] for i in perm)


def test_fit_sigma_stays_within_bounds():
    data = gen_rasch(60, (0.0, 0.3, -0.3), 0.5, seed=7)
    config = FitConfig(sigma_bounds=(0.9, 1.1))
    fit = fit_mml(data, config)
    assert 0.9 <= fit.sigma_theta <= 1.1


def test_fit_config_validation():
    with pytest.raises(ConfigError):
        FitConfig(quad_points=0)
    with pytest.raises(ConfigError):
        FitConfig(tol=0.0)
    with pytest.raises(ConfigError):
        FitConfig(sigma_bounds=(2.0, 1.0))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_fit_monotone_on_random_instances(seed):
    rng = np.random.default_rng(seed)
    data = random_binary(rng, int(rng.integers(10, 40)), int(rng.integers(2, 5)))
    fit = fit_mml(data, FitConfig(quad_points=15))
    assert (np.diff(fit.loglik_trace) > -1e-9).all()
