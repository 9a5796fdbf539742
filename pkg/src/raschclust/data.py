"""Binary response matrices: persons x items with labelled columns."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class ResponseMatrix:
    """P x I table of 0/1 responses with unique item labels per column."""

    values: np.ndarray
    item_labels: tuple[str, ...] = ()

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 2:
            raise DataError(f"response table must be 2-d, got shape {values.shape}")
        if not np.isin(values, (0, 1)).all():
            raise DataError("response table must contain only 0 and 1")
        values = values.astype(np.int8)
        P, I = values.shape
        if P < 2:
            raise DataError(f"need at least 2 persons, got {P}")
        if I < 2:
            raise DataError(f"need at least 2 items, got {I}")
        labels = tuple(self.item_labels) or tuple(f"item{i + 1}" for i in range(I))
        if len(labels) != I:
            raise DataError(f"{len(labels)} labels for {I} items")
        if len(set(labels)) != I:
            raise DataError("item labels must be unique")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "item_labels", labels)

    @property
    def person_count(self) -> int:
        return self.values.shape[0]

    @property
    def item_count(self) -> int:
        return self.values.shape[1]

    def restrict(self, items) -> "ResponseMatrix":
        """Column subset, keeping the given order. `items` are 0-based indices."""
        items = list(items)
        if len(items) != len(set(items)):
            raise DataError("duplicate item indices")
        for i in items:
            if not 0 <= i < self.item_count:
                raise DataError(f"item index {i} out of range")
        return ResponseMatrix(self.values[:, items],
                              tuple(self.item_labels[i] for i in items))

    def take_persons(self, rows) -> "ResponseMatrix":
        rows = np.asarray(rows)
        return ResponseMatrix(self.values[rows], self.item_labels)

    def constant_items(self) -> list[int]:
        """Indices of all-0 or all-1 columns."""
        sums = self.values.sum(axis=0)
        return [int(i) for i in np.flatnonzero((sums == 0) | (sums == self.person_count))]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.item_labels) + "\n")
        for row in self.values:
            buf.write(",".join(str(int(v)) for v in row) + "\n")
        return buf.getvalue()


def parse_csv(text: str) -> ResponseMatrix:
    """Parse a response CSV: header of item labels, then 0/1 rows.

    An optional leading ``person_id`` column is ignored for modelling.
    """
    lines = [ln for ln in text.splitlines() if ln.strip() != ""]
    if not lines:
        raise DataError("empty file")
    header = [h.strip() for h in lines[0].split(",")]
    skip_first = bool(header) and header[0].lower() == "person_id"
    labels = header[1:] if skip_first else header
    if not labels:
        raise DataError("header has no item labels")
    if len(set(labels)) != len(labels):
        dupes = sorted({l for l in labels if labels.count(l) > 1})
        raise DataError(f"duplicate item labels: {', '.join(dupes)}")
    rows = []
    for r, line in enumerate(lines[1:], start=2):
        cells = [c.strip() for c in line.split(",")]
        if skip_first:
            cells = cells[1:]
        if len(cells) != len(labels):
            raise DataError(f"row {r} has {len(cells)} cells, expected {len(labels)}")
        row = []
        for c, cell in enumerate(cells):
            if cell not in ("0", "1"):
                raise DataError(f"non-binary cell {cell!r} at row {r}, column {labels[c]!r}")
            row.append(int(cell))
        rows.append(row)
    if not rows:
        raise DataError("no data rows")
    return ResponseMatrix(np.array(rows, dtype=np.int8), tuple(labels))


def read_csv(path) -> ResponseMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_csv(fh.read())
