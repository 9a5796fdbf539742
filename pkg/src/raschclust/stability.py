"""Subsampling stability: inclusion-order distributions, misfit scores and
co-clustering similarities over randomly drawn person subsets."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .data import ResponseMatrix
from .errors import ConfigError, DataError
from .estimation import FitConfig
from .selection import select_sequence

log = logging.getLogger(__name__)

ORDER_ALGORITHMS = ("sequential", "hierarchical-first-cluster")


@dataclass(frozen=True)
class OrderMatrix:
    """I x M table; o[i, m] is item i's 1-based inclusion order on subset m."""

    orders: np.ndarray
    subsets: tuple[tuple[int, ...], ...]
    proportion: float
    base_seed: int
    item_labels: tuple[str, ...]

    def __post_init__(self):
        orders = np.asarray(self.orders, dtype=int)
        if orders.ndim != 2 or orders.shape[1] < 1:
            raise DataError("orders must be an I x M table with M >= 1")
        I, M = orders.shape
        for m in range(M):
            if sorted(orders[:, m]) != list(range(1, I + 1)):
                raise DataError(f"column {m} is not a permutation of 1..{I}")
        if len(self.item_labels) != I:
            raise DataError("item labels misaligned with order rows")
        if len(self.subsets) != M:
            raise DataError("one person subset per column required")
        orders.setflags(write=False)
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "subsets",
                           tuple(tuple(int(p) for p in s) for s in self.subsets))

    @property
    def item_count(self) -> int:
        return self.orders.shape[0]

    @property
    def subset_count(self) -> int:
        return self.orders.shape[1]

    def to_dict(self) -> dict:
        return {
            "item_labels": list(self.item_labels),
            "orders": self.orders.tolist(),
            "proportion": float(self.proportion),
            "base_seed": int(self.base_seed),
            "subset_sizes": [len(s) for s in self.subsets],
        }


@dataclass(frozen=True)
class MisfitReport:
    """Per-item misfit scores and standardized mean orders."""

    misfit: np.ndarray
    mean_std: np.ndarray
    threshold: float
    item_labels: tuple[str, ...]

    def __post_init__(self):
        for name in ("misfit", "mean_std"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.ndim != 1 or len(v) != len(self.item_labels):
                raise DataError(f"{name} misaligned with item labels")
            if (v < 0).any() or (v > 1).any():
                raise DataError(f"{name} must lie in [0, 1]")
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    def to_dict(self) -> dict:
        return {
            "item_labels": list(self.item_labels),
            "misfit": [float(v) for v in self.misfit],
            "mean_std": [float(v) for v in self.mean_std],
            "threshold": float(self.threshold),
        }

    def to_csv(self) -> str:
        lines = ["item,label,misfit,mean_std"]
        for i, lab in enumerate(self.item_labels):
            lines.append(f"{i + 1},{lab},{self.misfit[i]!r},{self.mean_std[i]!r}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SimilarityMatrix:
    """Co-clustering similarities s_ij in [0, 1] with unit diagonal."""

    values: np.ndarray
    item_labels: tuple[str, ...]

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        I = len(self.item_labels)
        if v.shape != (I, I):
            raise DataError("similarity matrix misaligned with item labels")
        if not np.allclose(v, v.T, atol=0):
            raise DataError("similarity matrix must be symmetric")
        if not np.allclose(np.diag(v), 1.0, atol=0):
            raise DataError("similarity diagonal must be exactly 1")
        if (v < 0).any() or (v > 1).any():
            raise DataError("similarities must lie in [0, 1]")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def to_dict(self) -> dict:
        return {"item_labels": list(self.item_labels),
                "similarities": self.values.tolist()}

    def to_csv(self) -> str:
        lines = ["," + ",".join(self.item_labels)]
        for lab, row in zip(self.item_labels, self.values):
            lines.append(lab + "," + ",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"


def _draw_subsets(data: ResponseMatrix, M: int, proportion: float, seed: int):
    """Person subsets without replacement; degenerate draws are retried.

    Stream (seed, m, retry) makes each column reproducible independently of
    how the others were processed.
    """
    if M < 1:
        raise ConfigError(f"need at least one subset, got M={M}")
    if not 0 < proportion <= 1:
        raise ConfigError(f"proportion must be in (0, 1], got {proportion}")
    size = int(np.floor(proportion * data.person_count))
    if size < 10:
        raise ConfigError(
            f"subset size floor({proportion} * {data.person_count}) = {size} "
            "is below the minimum of 10 persons")
    subsets = []
    for m in range(M):
        for retry in range(10):
            rng = np.random.default_rng(np.random.SeedSequence([seed, m, retry]))
            rows = np.sort(rng.choice(data.person_count, size=size, replace=False))
            sub = data.take_persons(rows)
            bad = sub.constant_items()
            if not bad:
                subsets.append((rows, sub))
                break
            log.warning("subset %d draw %d produced constant column(s) %s; redrawing",
                        m, retry, [data.item_labels[i] for i in bad])
        else:
            raise DataError(
                f"subset {m} kept producing constant item columns after 10 draws")
    return subsets


def _first_cluster_order(dendrogram) -> list[int]:
    """Inclusion order of items into the cluster grown from the first merge.

    When a merge attaches several items at once they take consecutive
    positions in ascending item index; items never joining before the final
    merge are appended at the end the same way.
    """
    order: list[int] = []
    member_set: set[int] = set()
    for step in dendrogram.merges:
        members = set(step.members)
        if not order:
            order = sorted(members)
            member_set = members
        elif member_set < members:
            order += sorted(members - member_set)
            member_set = members
    return order


def subsample_orders(data: ResponseMatrix, M: int = 20, proportion: float = 0.5,
                     algorithm: str = "sequential", seed: int = 0,
                     config: FitConfig = FitConfig()) -> OrderMatrix:
    """Inclusion orders of every item over M random person subsets."""
    if algorithm not in ORDER_ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algorithm!r}; "
                          f"known: {', '.join(ORDER_ALGORITHMS)}")
    I = data.item_count
    orders = np.empty((I, M), dtype=int)
    subsets = []
    for m, (rows, sub) in enumerate(_draw_subsets(data, M, proportion, seed)):
        if algorithm == "sequential":
            seq = list(select_sequence(sub, config).order)
        else:
            from .hierarchy import hcluster_marginal
            seq = _first_cluster_order(hcluster_marginal(sub, config))
        for pos, item in enumerate(seq, start=1):
            orders[item, m] = pos
        subsets.append(tuple(int(r) for r in rows))
    return OrderMatrix(orders, tuple(subsets), proportion, seed, data.item_labels)


def misfit_scores(orders: OrderMatrix, a: float = 0.75) -> MisfitReport:
    """mf_i = share of subsets where item i enters after position a*I (strict);
    mean_std_i rescales the mean order to [0, 1]."""
    I, M = orders.orders.shape
    mf = (orders.orders > a * I).sum(axis=1) / M
    mean_std = (orders.orders - 1).sum(axis=1) / (M * (I - 1))
    return MisfitReport(mf, mean_std, a, orders.item_labels)


def order_density(orders: OrderMatrix, item: int, points: int = 200):
    """Gaussian kernel density of an item's inclusion orders on grid 1..I.

    Silverman bandwidth with a floor of 0.5 (orders are integers, so the
    plug-in bandwidth degenerates when all orders coincide).
    """
    I = orders.item_count
    if not 0 <= item < I:
        raise DataError(f"item index {item} out of range")
    obs = orders.orders[item].astype(float)
    M = obs.size
    bw = max(0.5, 1.06 * obs.std(ddof=1 if M > 1 else 0) * M ** (-0.2))
    grid = np.linspace(1.0, I, points)
    # reflect mass at the support boundaries so the curve integrates to ~1
    reflected = np.concatenate([obs, 2.0 - obs, 2.0 * I - obs])
    z = (grid[:, None] - reflected[None, :]) / bw
    dens = np.exp(-0.5 * z ** 2).sum(axis=1) / (M * bw * np.sqrt(2 * np.pi))
    return grid, dens


def coclustering_fractions(dendrogram) -> np.ndarray:
    """s_ij for a single dendrogram: the number of non-final partitions in
    which i and j share a cluster, divided by I - 1."""
    I = len(dendrogram.leaves)
    counts = np.zeros((I, I))
    # partitions P_1..P_{I-2}: after each merge except the final one
    members = {i: {i} for i in range(I)}
    for step in dendrogram.merges[:-1] if I > 2 else []:
        merged = set(step.members)
        for i in merged:
            members[i] = merged
        for i in range(I):
            for j in range(i + 1, I):
                if j in members[i]:
                    counts[i, j] += 1
                    counts[j, i] += 1
    s = counts / (I - 1)
    np.fill_diagonal(s, 1.0)
    return s


def pairwise_similarity(data: ResponseMatrix, M: int = 15, proportion: float = 0.5,
                        seed: int = 0,
                        config: FitConfig = FitConfig()) -> SimilarityMatrix:
    """Average co-clustering similarity over M subset-wise hierarchical runs."""
    from .hierarchy import hcluster_marginal
    I = data.item_count
    total = np.zeros((I, I))
    for rows, sub in _draw_subsets(data, M, proportion, seed):
        total += coclustering_fractions(hcluster_marginal(sub, config))
    s = total / M
    np.fill_diagonal(s, 1.0)
    return SimilarityMatrix(s, data.item_labels)


def similarity_to_distance(s: SimilarityMatrix) -> np.ndarray:
    """d_ij = 1 - s_ij with an exactly zero diagonal."""
    d = 1.0 - s.values
    np.fill_diagonal(d, 0.0)
    return d
