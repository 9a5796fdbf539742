"""Agglomerative clustering of items.

Two flavours: the marginal method fuses whichever pair of clusters gives the
largest fitted mixing standard deviation, and the classical baselines run
average or centroid linkage on a distance matrix via Lance-Williams updates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import ResponseMatrix
from .errors import DataError
from .estimation import FitConfig
from .selection import Partition, _check_selectable, _FitCache

LINKAGES = ("average", "centroid")


@dataclass(frozen=True)
class MergeStep:
    """One fusion: child cluster ids, resulting 0-based member set, height."""

    left: int
    right: int
    members: tuple[int, ...]
    step: int
    sigma: float | None = None
    distance: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "members",
                           tuple(sorted(int(i) for i in self.members)))

    @property
    def height(self) -> float:
        return float(self.step if self.distance is None else self.distance)

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "left": self.left,
            "right": self.right,
            "members": [i + 1 for i in self.members],
            "sigma": None if self.sigma is None else float(self.sigma),
            "distance": None if self.distance is None else float(self.distance),
        }


@dataclass(frozen=True)
class Dendrogram:
    """Binary merge tree over the items.

    Cluster ids: 0..I-1 are the leaves, I+s-1 is the cluster created by
    merge step s (1-based). height_mode is "step-index" for the marginal
    method (sigma is an annotation, not a monotone height) and
    "linkage-distance" for the classical baselines.
    """

    leaves: tuple[str, ...]
    merges: tuple[MergeStep, ...]
    height_mode: str

    def __post_init__(self):
        I = len(self.leaves)
        if len(self.merges) != I - 1:
            raise DataError(f"{I} leaves need {I - 1} merges")
        if self.height_mode not in ("step-index", "linkage-distance"):
            raise DataError(f"unknown height mode {self.height_mode!r}")
        members = {i: (i,) for i in range(I)}
        for s, m in enumerate(self.merges, start=1):
            if m.step != s:
                raise DataError("merge steps must be numbered 1..I-1 in order")
            if m.left not in members or m.right not in members or m.left == m.right:
                raise DataError(f"step {s} merges unavailable clusters")
            union = tuple(sorted(members.pop(m.left) + members.pop(m.right)))
            if union != m.members:
                raise DataError(f"step {s} members are not the children's union")
            members[I + s - 1] = union
        if len(members) != 1 or next(iter(members.values())) != tuple(range(I)):
            raise DataError("merges must form one binary tree over all leaves")

    @property
    def item_count(self) -> int:
        return len(self.leaves)

    def cluster_members(self) -> dict[int, tuple[int, ...]]:
        members = {i: (i,) for i in range(self.item_count)}
        for s, m in enumerate(self.merges, start=1):
            members[self.item_count + s - 1] = m.members
        return members

    def to_dict(self) -> dict:
        return {"leaves": list(self.leaves),
                "height_mode": self.height_mode,
                "merges": [m.to_dict() for m in self.merges]}

    def to_newick(self) -> str:
        """Newick text with branch annotations by merge height."""
        I = self.item_count
        reps: dict[int, str] = {i: self.leaves[i] for i in range(I)}
        height = ""
        for s, m in enumerate(self.merges, start=1):
            node = f"({reps.pop(m.left)},{reps.pop(m.right)}):{m.height:g}"
            reps[I + s - 1] = node
            height = f"{m.height:g}"
        (root,) = reps.values()
        # strip the root's redundant height suffix
        return root[: -(len(height) + 1)] + ";"


def hcluster_marginal(data: ResponseMatrix,
                      config: FitConfig = FitConfig()) -> Dendrogram:
    """Clustering II: repeatedly fuse the cluster pair whose union has the
    largest fitted sigma; ties go to the lexicographically smallest member
    pair of cluster ids."""
    I = _check_selectable(data)
    cache = _FitCache(data, config)
    active: dict[int, tuple[int, ...]] = {i: (i,) for i in range(I)}
    merges = []
    for step in range(1, I):
        ids = sorted(active)
        best = None
        best_sigma = -np.inf
        for a_pos, a in enumerate(ids):
            for b in ids[a_pos + 1:]:
                s = cache.sigma(active[a] + active[b])
                if s > best_sigma:
                    best, best_sigma = (a, b), s
        a, b = best
        union = tuple(sorted(active.pop(a) + active.pop(b)))
        new_id = I + step - 1
        active[new_id] = union
        merges.append(MergeStep(left=a, right=b, members=union, step=step,
                                sigma=best_sigma))
    return Dendrogram(data.item_labels, tuple(merges), "step-index")


def euclidean_item_distances(data: ResponseMatrix) -> np.ndarray:
    """d_ij = Euclidean distance between item response columns."""
    Y = data.values.astype(float)
    diff = (Y[:, :, None] != Y[:, None, :]).sum(axis=0).astype(float)
    return np.sqrt(diff)


def agglomerate(dist: np.ndarray, linkage: str = "average",
                labels: tuple[str, ...] = ()) -> Dendrogram:
    """Classical agglomerative clustering by Lance-Williams updates.

    average: d(A+B, C) = (|A| d(A,C) + |B| d(B,C)) / (|A|+|B|).
    centroid: updates squared distances by the centroid formula; reported
    heights are the (root) centroid distances and inversions are preserved.
    """
    if linkage not in LINKAGES:
        raise DataError(f"unknown linkage {linkage!r}; known: {', '.join(LINKAGES)}")
    dist = np.asarray(dist, dtype=float)
    I = dist.shape[0]
    if dist.ndim != 2 or dist.shape != (I, I) or I < 2:
        raise DataError("distance matrix must be square with at least 2 items")
    if not np.allclose(dist, dist.T, atol=1e-12):
        raise DataError("distance matrix must be symmetric")
    if not np.allclose(np.diag(dist), 0.0, atol=1e-12):
        raise DataError("distance matrix must have a zero diagonal")
    if (dist < 0).any():
        raise DataError("distances must be non-negative")
    labels = tuple(labels) or tuple(f"item{i + 1}" for i in range(I))
    if len(labels) != I:
        raise DataError(f"{len(labels)} labels for {I} items")

    # work on squared distances for centroid linkage, plain ones for average
    squared = linkage == "centroid"
    d: dict[tuple[int, int], float] = {}
    for i in range(I):
        for j in range(i + 1, I):
            d[(i, j)] = dist[i, j] ** 2 if squared else dist[i, j]
    size = {i: 1 for i in range(I)}
    members = {i: (i,) for i in range(I)}
    merges = []
    for step in range(1, I):
        ids = sorted(size)
        best = None
        best_d = np.inf
        for a_pos, a in enumerate(ids):
            for b in ids[a_pos + 1:]:
                v = d[(a, b)]
                if v < best_d:
                    best, best_d = (a, b), v
        a, b = best
        new_id = I + step - 1
        na, nb = size.pop(a), size.pop(b)
        for c in list(size):
            dac = d.pop(tuple(sorted((a, c))))
            dbc = d.pop(tuple(sorted((b, c))))
            if linkage == "average":
                v = (na * dac + nb * dbc) / (na + nb)
            else:
                v = (na * dac + nb * dbc) / (na + nb) \
                    - na * nb * best_d / (na + nb) ** 2
            d[(c, new_id)] = v
        d.pop((a, b))
        size[new_id] = na + nb
        union = tuple(sorted(members.pop(a) + members.pop(b)))
        members[new_id] = union
        height = float(np.sqrt(max(best_d, 0.0))) if squared else float(best_d)
        merges.append(MergeStep(left=a, right=b, members=union, step=step,
                                distance=height))
    return Dendrogram(labels, tuple(merges), "linkage-distance")


def cut_k(dendrogram: Dendrogram, k: int) -> Partition:
    """Partition into exactly k clusters by undoing the last k-1 merges."""
    I = dendrogram.item_count
    if not 1 <= k <= I:
        raise DataError(f"k must be in [1, {I}], got {k}")
    active: dict[int, tuple[int, ...]] = {i: (i,) for i in range(I)}
    for m in dendrogram.merges[: I - k]:
        active[I + m.step - 1] = tuple(sorted(active.pop(m.left)
                                              + active.pop(m.right)))
    return Partition(tuple(sorted(active.values())))


def centroid_item_coordinates(data: ResponseMatrix) -> np.ndarray:
    """Item response columns as points in person space (for centroid linkage)."""
    return data.values.astype(float).T
