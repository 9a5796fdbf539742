"""Pair-based clustering quality against a known truth, plus the classical
unidimensionality diagnostics (item correlations, conditional covariances)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import ResponseMatrix
from .errors import DataError, DegenerateItemError
from .hierarchy import Dendrogram, cut_k
from .selection import Partition


@dataclass(frozen=True)
class EvalCurve:
    """(hit rate, false allocation rate) per cluster count k = 1..I."""

    points: tuple[tuple[float, float], ...]
    labels: tuple[int, ...]

    def __post_init__(self):
        if len(self.points) != len(self.labels):
            raise DataError("one cluster-count label per point required")
        for h, f in self.points:
            if not (0 <= h <= 1 and 0 <= f <= 1):
                raise DataError("rates must lie in [0, 1]")

    def to_dict(self) -> dict:
        return {"points": [{"k": k, "hit_rate": h, "false_rate": f}
                           for k, (h, f) in zip(self.labels, self.points)]}

    def to_csv(self) -> str:
        lines = ["k,hit_rate,false_rate"]
        for k, (h, f) in zip(self.labels, self.points):
            lines.append(f"{k},{h!r},{f!r}")
        return "\n".join(lines) + "\n"


def _cocluster_mask(partition: Partition, I: int) -> np.ndarray:
    mask = np.zeros((I, I), dtype=bool)
    for cluster in partition.clusters:
        idx = np.array(cluster)
        mask[np.ix_(idx, idx)] = True
    return mask


def hit_false_rates(truth: Partition, estimate: Partition) -> tuple[float, float]:
    """Pair-level agreement: h = recovered co-clustered pairs / true
    co-clustered pairs; f = wrongly fused pairs / true separated pairs.

    Degenerate conventions: h = 1 when truth has no co-clustered pair,
    f = 0 when truth has no separated pair.
    """
    I = truth.item_count
    if estimate.item_count != I:
        raise DataError("partitions cover different item sets")
    iu = np.triu_indices(I, k=1)
    together_true = _cocluster_mask(truth, I)[iu]
    together_est = _cocluster_mask(estimate, I)[iu]
    n_true = int(together_true.sum())
    n_apart = together_true.size - n_true
    h = float((together_true & together_est).sum() / n_true) if n_true else 1.0
    f = float((~together_true & together_est).sum() / n_apart) if n_apart else 0.0
    return h, f


def roc_curve(truth: Partition, dendrogram: Dendrogram) -> EvalCurve:
    """hit_false_rates of every k-cut, ordered by cluster count k = 1..I."""
    I = dendrogram.item_count
    if truth.item_count != I:
        raise DataError("dendrogram leaves do not match the truth's item set")
    points = tuple(hit_false_rates(truth, cut_k(dendrogram, k))
                   for k in range(1, I + 1))
    return EvalCurve(points, tuple(range(1, I + 1)))


def item_correlations(data: ResponseMatrix) -> np.ndarray:
    """Pearson correlations between item columns."""
    bad = data.constant_items()
    if bad:
        raise DegenerateItemError([data.item_labels[i] for i in bad])
    corr = np.corrcoef(data.values.astype(float), rowvar=False)
    # enforce exact symmetry and unit diagonal (corrcoef is only
    # symmetric up to rounding)
    corr = (corr + corr.T) / 2.0
    np.fill_diagonal(corr, 1.0)
    return corr


def mean_conditional_covariance(data: ResponseMatrix) -> np.ndarray:
    """Item covariances among persons sharing a sum score, averaged
    (unweighted) over the interior scores 1..I-1; score groups with fewer
    than 2 persons are skipped. Diagonal holds mean conditional variances."""
    Y = data.values.astype(float)
    P, I = Y.shape
    scores = Y.sum(axis=1).astype(int)
    total = np.zeros((I, I))
    groups = 0
    for r in range(1, I):
        rows = Y[scores == r]
        # a group of identical rows has an all-zero covariance and carries
        # no information, so it does not qualify
        if rows.shape[0] < 2 or (rows == rows[0]).all():
            continue
        total += np.cov(rows, rowvar=False, ddof=1)
        groups += 1
    if groups == 0:
        raise DataError("no sum-score group with at least 2 persons and an "
                        "interior score; conditional covariances are undefined")
    return total / groups


def matrix_to_csv(values: np.ndarray, labels) -> str:
    """Square labelled matrix as CSV with a header row and label column."""
    labels = list(labels)
    lines = ["," + ",".join(labels)]
    for lab, row in zip(labels, np.asarray(values, dtype=float)):
        lines.append(lab + "," + ",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"
