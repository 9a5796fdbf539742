"""Marginal maximum likelihood estimation of the binary Rasch model.

The mixing distribution is a zero-mean normal; its standard deviation is
estimated jointly with the item difficulties by EM over a Gauss-Hermite
quadrature grid. The grid lives on the standard-normal scale and is
rescaled by the current sigma at every iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, log_expit, logsumexp

from ._emcore import _em_fit, _marginal_ll_grad
from .data import ResponseMatrix
from .errors import ConfigError, DataError, DegenerateItemError


def irf(theta: float, delta: float) -> float:
    """Probability of success for ability theta on an item of difficulty delta."""
    theta = float(theta)
    delta = float(delta)
    if not (math.isfinite(theta) and math.isfinite(delta)):
        raise DataError("irf requires finite ability and difficulty")
    return float(expit(theta - delta))


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes on the standard-normal scale with probability weights."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1 or nodes.size < 1:
            raise ConfigError("nodes and weights must be equal-length 1-d arrays")
        if nodes.size > 1 and not (np.diff(nodes) > 0).all():
            raise ConfigError("nodes must be strictly increasing")
        if (weights <= 0).any():
            raise ConfigError("weights must be positive")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ConfigError("weights must sum to 1")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)


def gauss_hermite_rule(n: int) -> QuadratureRule:
    """Gauss-Hermite rule normalized against the standard normal density.

    sum_k w_k g(x_k) integrates g exactly for polynomials up to degree 2n-1
    under N(0, 1); callers rescale nodes by sigma for N(0, sigma^2).
    """
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= 200:
        raise ConfigError(f"quadrature size must be an integer in [1, 200], got {n!r}")
    nodes, weights = np.polynomial.hermite_e.hermegauss(int(n))
    weights = weights / weights.sum()
    return QuadratureRule(nodes, weights)


@dataclass(frozen=True)
class FitConfig:
    quad_points: int = 30
    max_iter: int = 500
    tol: float = 1e-5
    sigma_bounds: tuple[float, float] = (1e-3, 10.0)

    def __post_init__(self):
        if self.quad_points < 1:
            raise ConfigError("quad_points must be positive")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be positive")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        lo, hi = self.sigma_bounds
        if not (0 < lo < hi):
            raise ConfigError("sigma_bounds must satisfy 0 < lo < hi")


@dataclass(frozen=True)
class RaschFit:
    """Result of a marginal fit; immutable."""

    difficulties: np.ndarray
    sigma_theta: float
    log_marginal_likelihood: float
    iterations: int
    converged: bool
    item_labels: tuple[str, ...]
    loglik_trace: np.ndarray = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {
            "item_labels": list(self.item_labels),
            "difficulties": [float(d) for d in self.difficulties],
            "sigma_theta": float(self.sigma_theta),
            "log_marginal_likelihood": float(self.log_marginal_likelihood),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
        }


def _pattern_loglik(patterns, theta, delta):
    """Per-pattern, per-node response log-likelihood (U x K)."""
    z = theta[None, :] - delta[:, None]          # I x K
    la = log_expit(z)
    lb = log_expit(-z)
    return patterns @ la + (1.0 - patterns) @ lb


def log_marginal_likelihood(data: ResponseMatrix, difficulties, sigma: float,
                            rule: QuadratureRule) -> float:
    """Log of the marginal likelihood under the normal mixing distribution.

    The ability integral is taken against N(0, sigma^2) by rescaling the
    rule's standard-normal nodes; per-person sums use log-sum-exp.
    """
    difficulties = np.asarray(difficulties, dtype=float)
    if difficulties.shape != (data.item_count,):
        raise DataError(
            f"{difficulties.size} difficulties for {data.item_count} items")
    if not sigma > 0:
        raise DataError("sigma must be positive")
    Y = data.values.astype(float)
    L = _pattern_loglik(Y, sigma * rule.nodes, difficulties)
    return float(logsumexp(L + np.log(rule.weights), axis=1).sum())


def fit_mml(data: ResponseMatrix, config: FitConfig = FitConfig()) -> RaschFit:
    """EM fit of difficulties and the mixing standard deviation.

    E-step: posterior weights of each person over the sigma-scaled quadrature
    nodes. M-step: per-item Newton on the weighted logistic score equation
    (guarded by step-halving), then a direct one-dimensional maximization of
    the marginal log-likelihood over sigma within the configured bounds.
    The mixing mean is fixed at 0. Both half-steps can only increase the
    recorded log marginal likelihood, so the trace is monotone by
    construction (the plain posterior-second-moment update for sigma is
    sublinear near the lower bound and was too slow for two-item fits).
    """
    bad = data.constant_items()
    if bad:
        raise DegenerateItemError([data.item_labels[i] for i in bad])

    P, I = data.values.shape
    patterns, counts = np.unique(data.values, axis=0, return_counts=True)
    successes = data.values.sum(axis=0).astype(float)

    rule = gauss_hermite_rule(config.quad_points)
    sig_lo, sig_hi = config.sigma_bounds

    # start values: centered logit of failure proportions for the
    # difficulties; sigma from a coarse profile of the discretized marginal
    # likelihood at delta0 (a fixed grid, so the start depends only on the
    # data, never on any earlier fit)
    delta0 = np.log((P - successes) / successes)
    delta0 -= delta0.mean()
    Yu = patterns.astype(np.int8)
    cu = counts.astype(float)
    logw = np.log(rule.weights)
    scratch = np.empty((Yu.shape[0], rule.nodes.shape[0]))
    pilot = [s for s in (0.3, 0.7, 1.0, 2.0, 3.0) if sig_lo <= s <= sig_hi]
    if not pilot:
        pilot = [min(max(1.0, sig_lo), sig_hi)]
    sigma0 = max(pilot, key=lambda s: _marginal_ll_grad(
        Yu, cu, rule.nodes, logw, delta0, s, scratch)[0])

    delta, sigma, trace, iterations, converged = _em_fit(
        Yu, cu, rule.nodes, logw, delta0, sigma0,
        config.tol, config.max_iter, sig_lo, sig_hi)
    ll = float(trace[-1])
    trace.setflags(write=False)
    delta.setflags(write=False)
    return RaschFit(difficulties=delta, sigma_theta=float(sigma),
                    log_marginal_likelihood=ll, iterations=iterations,
                    converged=converged, item_labels=data.item_labels,
                    loglik_trace=trace)


