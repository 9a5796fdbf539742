import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from raschclust.data import ResponseMatrix
from raschclust.errors import DataError, DegenerateItemError
from raschclust.estimation import FitConfig
from raschclust.evaluation import (hit_false_rates, item_correlations,
                                   mean_conditional_covariance, roc_curve)
from raschclust.hierarchy import hcluster_marginal
from raschclust.selection import Partition
from raschclust.simulate import gen_rasch, permute_items, preset


def _brute_force_rates(truth, estimate):
    def cluster_of(part, item):
        return next(n for n, c in enumerate(part.clusters) if item in c)

    I = truth.item_count
    hits = together = falses = apart = 0
    for i, j in itertools.combinations(range(I), 2):
        t = cluster_of(truth, i) == cluster_of(truth, j)
        e = cluster_of(estimate, i) == cluster_of(estimate, j)
        together += t
        apart += not t
        hits += t and e
        falses += (not t) and e
    h = hits / together if together else 1.0
    f = falses / apart if apart else 0.0
    return h, f


def _random_partition(rng, I):
    k = int(rng.integers(1, I + 1))
    assignment = rng.integers(0, k, size=I)
    clusters = [tuple(np.flatnonzero(assignment == c)) for c in range(k)]
    return Partition(tuple(c for c in clusters if c))


def test_perfect_recovery():
    truth = Partition((tuple(range(6)), tuple(range(6, 12))))
    assert hit_false_rates(truth, truth) == (1.0, 0.0)


def test_endpoints():
    truth = Partition(((0, 1, 2), (3, 4, 5)))
    one = Partition((tuple(range(6)),))
    singletons = Partition(tuple((i,) for i in range(6)))
    assert hit_false_rates(truth, one) == (1.0, 1.0)
    assert hit_false_rates(truth, singletons) == (0.0, 0.0)


def test_degenerate_truth_conventions():
    singletons = Partition(tuple((i,) for i in range(4)))
    one = Partition((tuple(range(4)),))
    # truth with no co-clustered pair: h = 1 by convention
    assert hit_false_rates(singletons, one) == (1.0, 1.0)
    # truth with no separated pair: f = 0 by convention
    assert hit_false_rates(one, singletons) == (0.0, 0.0)


def test_mismatched_item_sets():
    with pytest.raises(DataError, match="different item sets"):
        hit_false_rates(Partition(((0, 1),)), Partition(((0, 1), (2,))))


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 12), st.integers(0, 10 ** 6))
def test_matches_brute_force_enumeration(I, seed):
    rng = np.random.default_rng(seed)
    truth = _random_partition(rng, I)
    estimate = _random_partition(rng, I)
    assert hit_false_rates(truth, estimate) == _brute_force_rates(truth,
                                                                  estimate)


def test_relabeling_invariance():
    rng = np.random.default_rng(3)
    truth = _random_partition(rng, 9)
    estimate = _random_partition(rng, 9)
    perm = rng.permutation(9)
    remap = lambda p: Partition(tuple(tuple(int(perm[i]) for i in c)
                                      for c in p.clusters))
    assert hit_false_rates(truth, estimate) == hit_false_rates(remap(truth),
                                                               remap(estimate))


def test_roc_curve_endpoints_and_monotonicity():
    data = preset("clusters3x3").with_seed(5).realize(0)
    truth = Partition(((0, 1, 2), (3, 4, 5)))
    dend = hcluster_marginal(data, FitConfig(quad_points=15))
    curve = roc_curve(truth, dend)
    assert curve.labels == tuple(range(1, 7))
    assert curve.points[0] == (1.0, 1.0)
    assert curve.points[-1] == (0.0, 0.0)
    hs = [p[0] for p in curve.points]
    fs = [p[1] for p in curve.points]
    assert all(b <= a + 1e-12 for a, b in zip(hs, hs[1:]))
    assert all(b <= a + 1e-12 for a, b in zip(fs, fs[1:]))
    assert "k,hit_rate,false_rate" in curve.to_csv()


# ------------------------------------------------------------ diagnostics

def test_correlations_basic(rasch6):
    corr = item_correlations(rasch6)
    assert corr.shape == (6, 6)
    assert np.diag(corr) == pytest.approx(np.ones(6))
    assert (corr == corr.T).all()
    assert np.linalg.eigvalsh(corr).min() > -1e-10


def test_duplicated_column_correlates_perfectly():
    rng = np.random.default_rng(0)
    col = rng.integers(0, 2, size=50)
    col[0], col[1] = 0, 1
    data = ResponseMatrix(np.column_stack([col, col, rng.integers(0, 2, 50)]))
    corr = item_correlations(data)
    assert corr[0, 1] == pytest.approx(1.0)


def test_correlations_reject_constant_column():
    values = np.array([[1, 0], [1, 1], [1, 0]])
    with pytest.raises(DegenerateItemError):
        item_correlations(ResponseMatrix(values))


def test_independent_columns_uncorrelated():
    data = gen_rasch(5000, (0.0, 0.5, -0.5, 1.0), 1.0, seed=1)
    shuffled = permute_items(data, [0, 1, 2, 3], seed=2)
    corr = item_correlations(shuffled)
    off = corr[~np.eye(4, dtype=bool)]
    assert np.abs(off).max() < 0.1


def test_conditional_covariance_brute_force(rasch6):
    """Oracle: direct per-score covariance computation."""
    got = mean_conditional_covariance(rasch6)
    Y = rasch6.values.astype(float)
    scores = Y.sum(axis=1)
    mats = []
    for r in range(1, 6):
        rows = Y[scores == r]
        if rows.shape[0] < 2 or (rows == rows[0]).all():
            continue
        mats.append(np.cov(rows.T, ddof=1))
    want = np.mean(mats, axis=0)
    assert got == pytest.approx(want, abs=1e-12)
    assert (got == got.T).all()


def test_conditional_covariance_of_duplicated_column():
    rng = np.random.default_rng(5)
    col = rng.integers(0, 2, size=400)
    other = rng.integers(0, 2, size=400)
    data = ResponseMatrix(np.column_stack([col, col, other, 1 - other]))
    ccov = mean_conditional_covariance(data)
    assert ccov[0, 1] == pytest.approx(ccov[0, 0], abs=1e-12)
    assert ccov[0, 0] >= 0.0


def test_conditional_covariance_degenerate_rows_error():
    values = np.tile(np.array([[0, 1, 1]]), (5, 1))
    with pytest.raises(DataError, match="no sum-score group"):
        mean_conditional_covariance(ResponseMatrix(values))


def test_rasch_data_negative_conditional_covariance():
    # one strong seed-level demonstration of the Table-1 effect
    data = gen_rasch(2000, (0.0, -0.5, 0.5, 1.0), 1.0, seed=11)
    ccov = mean_conditional_covariance(data)
    corr = item_correlations(data)
    off = ~np.eye(4, dtype=bool)
    assert corr[off].mean() > 0.0
    assert ccov[off].mean() < 0.0
