"""Greedy growth of a single Rasch cluster by fused-cluster sigma.

The inclusion criterion is the estimated standard deviation of the mixing
distribution when the candidate cluster is fitted as one Rasch model: it
stays in the range of the true value while the items share a trait and
collapses when an alien item is added.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import ResponseMatrix
from .errors import DataError
from .estimation import FitConfig, RaschFit, fit_mml

CRITERIA = ("max-sigma", "sigma-change", "delta-change", "hybrid")


@dataclass(frozen=True)
class Partition:
    """Disjoint, covering clusters of 0-based item indices."""

    clusters: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        clusters = tuple(tuple(sorted(int(i) for i in c)) for c in self.clusters)
        seen = set()
        for c in clusters:
            if not c:
                raise DataError("empty cluster")
            if seen & set(c):
                raise DataError("clusters overlap")
            seen |= set(c)
        if seen != set(range(len(seen))) or not seen:
            raise DataError("clusters must cover 0..I-1 exactly")
        object.__setattr__(self, "clusters", clusters)

    @property
    def item_count(self) -> int:
        return sum(len(c) for c in self.clusters)

    def to_dict(self) -> dict:
        return {"clusters": [[i + 1 for i in c] for c in self.clusters]}


@dataclass(frozen=True)
class SelectionTrace:
    """Inclusion order (0-based indices) with per-step fused-cluster sigma."""

    order: tuple[int, ...]
    step_sigma: tuple[float, ...]
    criterion: str
    labels: tuple[str, ...]
    anchor: int | None = None

    def __post_init__(self):
        if sorted(self.order) != list(range(len(self.order))):
            raise DataError("order must be a permutation of the items")
        if len(self.step_sigma) != len(self.order) - 1:
            raise DataError("need one sigma per fusion step")

    def order_of(self, item: int) -> int:
        """1-based inclusion position of an item (the two seed items share 1, 2)."""
        return self.order.index(item) + 1

    def to_dict(self) -> dict:
        return {
            "order": [i + 1 for i in self.order],
            "order_labels": [self.labels[i] for i in self.order],
            "step_sigma": [float(s) for s in self.step_sigma],
            "criterion": self.criterion,
            "anchor": None if self.anchor is None else self.anchor + 1,
        }

    def to_csv(self) -> str:
        lines = ["step,item,label,sigma"]
        lines.append(f"1,{self.order[0] + 1},{self.labels[self.order[0]]},")
        for step, (item, sig) in enumerate(zip(self.order[1:], self.step_sigma), 1):
            lines.append(f"{step},{item + 1},{self.labels[item]},{sig!r}")
        return "\n".join(lines) + "\n"


class _FitCache:
    """Memoized marginal fits on column subsets, keyed by sorted item set."""

    def __init__(self, data: ResponseMatrix, config: FitConfig):
        self.data = data
        self.config = config
        self._fits: dict[tuple[int, ...], RaschFit] = {}

    def fit(self, items) -> RaschFit:
        key = tuple(sorted(items))
        fit = self._fits.get(key)
        if fit is None:
            fit = fit_mml(self.data.restrict(list(key)), self.config)
            self._fits[key] = fit
        return fit

    def sigma(self, items) -> float:
        return self.fit(items).sigma_theta


def fusion_homogeneity(data: ResponseMatrix, cluster,
                       config: FitConfig = FitConfig()) -> float:
    """Estimated mixing standard deviation of the fused item set."""
    cluster = sorted(set(int(i) for i in cluster))
    if len(cluster) < 2:
        raise DataError("a fused cluster needs at least 2 items")
    return fit_mml(data.restrict(cluster), config).sigma_theta


def _seed_pair(cache: _FitCache, I: int, anchor: int | None) -> tuple[int, int]:
    """Argmax-sigma item pair; ties broken by lexicographically smallest pair."""
    if anchor is None:
        pairs = [(i, j) for i in range(I) for j in range(i + 1, I)]
    else:
        pairs = [tuple(sorted((anchor, j))) for j in range(I) if j != anchor]
    best = None
    best_sigma = -np.inf
    for pair in pairs:
        s = cache.sigma(pair)
        if s > best_sigma:
            best, best_sigma = pair, s
    return best


def _grow(cache: _FitCache, I: int, order: list[int],
          pick) -> tuple[list[int], list[float]]:
    """Extend `order` one item at a time until all items are included.

    `pick(current, candidates)` returns the chosen item; ties inside pick
    must already be broken by smallest index.
    """
    step_sigma = [cache.sigma(order)]
    while len(order) < I:
        candidates = [j for j in range(I) if j not in order]
        j = pick(order, candidates)
        order.append(j)
        step_sigma.append(cache.sigma(order))
    return order, step_sigma


def _pick_max_sigma(cache: _FitCache):
    def pick(current, candidates):
        best, best_sigma = None, -np.inf
        for j in candidates:
            s = cache.sigma(current + [j])
            if s > best_sigma:
                best, best_sigma = j, s
        return best
    return pick


def _pick_delta_change(cache: _FitCache):
    def pick(current, candidates):
        base = cache.fit(current)
        key = tuple(sorted(current))
        best, best_change = None, np.inf
        for j in candidates:
            fit = cache.fit(current + [j])
            merged_key = tuple(sorted(current + [j]))
            pos = {item: k for k, item in enumerate(merged_key)}
            change = sum(
                abs(base.difficulties[a] - fit.difficulties[pos[item]])
                for a, item in enumerate(key))
            if change < best_change:
                best, best_change = j, change
        return best
    return pick


def select_sequence(data: ResponseMatrix,
                    config: FitConfig = FitConfig()) -> SelectionTrace:
    """Clustering I: seed with the max-sigma pair, then grow by argmax sigma."""
    I = _check_selectable(data)
    cache = _FitCache(data, config)
    pair = _seed_pair(cache, I, None)
    order, step_sigma = _grow(cache, I, list(pair), _pick_max_sigma(cache))
    return SelectionTrace(tuple(order), tuple(step_sigma), "max-sigma",
                          data.item_labels)


def select_with_anchor(data: ResponseMatrix, anchor: int,
                       config: FitConfig = FitConfig()) -> SelectionTrace:
    """Clustering I started from a known-good anchor item (0-based)."""
    I = _check_selectable(data)
    if not 0 <= anchor < I:
        raise DataError(f"anchor index {anchor} out of range")
    cache = _FitCache(data, config)
    pair = _seed_pair(cache, I, anchor)
    order = [anchor, pair[0] if pair[1] == anchor else pair[1]]
    order, step_sigma = _grow(cache, I, order, _pick_max_sigma(cache))
    return SelectionTrace(tuple(order), tuple(step_sigma), "max-sigma",
                          data.item_labels, anchor=anchor)


def change_sequence(data: ResponseMatrix, mode: str,
                    config: FitConfig = FitConfig()) -> SelectionTrace:
    """Change-based variants of the inclusion criterion.

    sigma-change minimizes sigma(C) - sigma(C + {j}), which picks the same
    item as maximizing sigma(C + {j}) because the minuend does not depend
    on j; delta-change minimizes the summed absolute change of the shared
    difficulties; hybrid seeds with max-sigma and then uses delta-change.
    """
    if mode not in ("sigma-change", "delta-change", "hybrid"):
        raise DataError(f"unknown selection mode {mode!r}")
    if mode == "sigma-change":
        base = select_sequence(data, config)
        return SelectionTrace(base.order, base.step_sigma, "sigma-change",
                              base.labels)

    I = _check_selectable(data)
    cache = _FitCache(data, config)
    if mode == "hybrid":
        pair = _seed_pair(cache, I, None)
    else:
        # pure delta-change: seed with the pair whose fitted difficulties
        # move least from the single-item moment estimates
        P = data.person_count
        marginal = np.log((P - data.values.sum(axis=0)) / data.values.sum(axis=0))
        best, best_change = None, np.inf
        for i in range(I):
            for j in range(i + 1, I):
                fit = cache.fit((i, j))
                change = (abs(fit.difficulties[0] - marginal[i])
                          + abs(fit.difficulties[1] - marginal[j]))
                if change < best_change:
                    best, best_change = (i, j), change
        pair = best
    order, step_sigma = _grow(cache, I, list(pair), _pick_delta_change(cache))
    return SelectionTrace(tuple(order), tuple(step_sigma), mode, data.item_labels)


def _check_selectable(data: ResponseMatrix) -> int:
    if data.item_count < 3:
        raise DataError("selection needs at least 3 items")
    bad = data.constant_items()
    if bad:
        from .errors import DegenerateItemError
        raise DegenerateItemError([data.item_labels[i] for i in bad])
    return data.item_count
