"""Contingency tables: plain cross-counts and weighted tables built from
redistribution weights.

Cells are real-valued, not integer, because redistribution spreads a
censored subject's unit mass fractionally over event-time columns.  Only
observed (composite) categories get rows; empty categories would carry zero
mass and contribute nothing to conditional entropy anyway.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Sequence

import numpy as np

from .binning import BinningScheme, categorize
from .data import Dataset
from .redistribution import WeightMatrix, build_cross_weight_matrix


@dataclass(frozen=True)
class ContingencyTable:
    """Nonnegative real-valued cross-tabulation with labelled categories."""

    row_labels: tuple[Hashable, ...]
    col_labels: tuple[Hashable, ...]
    cells: np.ndarray

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=float)
        if cells.ndim != 2:
            raise ValueError("cells must be a 2-D array")
        if cells.shape != (len(self.row_labels), len(self.col_labels)):
            raise ValueError("labels do not match cell dimensions")
        if np.any(cells < 0):
            raise ValueError("cells must be nonnegative")
        object.__setattr__(self, "cells", cells)
        cells.setflags(write=False)

    @property
    def total(self) -> float:
        return float(self.cells.sum())

    def row_sums(self) -> np.ndarray:
        return self.cells.sum(axis=1)

    def col_sums(self) -> np.ndarray:
        return self.cells.sum(axis=0)

    def transpose(self) -> "ContingencyTable":
        return ContingencyTable(self.col_labels, self.row_labels, self.cells.T)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["", *map(_label_str, self.col_labels)])
            for lab, row in zip(self.row_labels, self.cells):
                writer.writerow([_label_str(lab), *(repr(float(v)) for v in row)])

    def plot_triplets(self) -> list[tuple[str, str, float]]:
        """(row label, col label, value) triplets for external heatmaps."""
        out = []
        for i, rl in enumerate(self.row_labels):
            for j, cl in enumerate(self.col_labels):
                out.append((_label_str(rl), _label_str(cl), float(self.cells[i, j])))
        return out


def _label_str(label: Hashable) -> str:
    if isinstance(label, tuple):
        return "_".join(str(x) for x in label)
    return str(label)


def fuse_categories(cat_vectors: Sequence[np.ndarray]) -> tuple[np.ndarray, list[tuple]]:
    """Fuse parallel ordinal vectors into one composite categorical variable.

    Each distinct tuple of codes becomes one composite category; only
    observed tuples are materialized and labels are ordered
    lexicographically.  Returns 1-based composite codes plus the tuple label
    for each composite level.
    """
    if len(cat_vectors) == 0:
        raise ValueError("need at least one category vector")
    arrs = [np.asarray(v) for v in cat_vectors]
    n = arrs[0].shape[0]
    if any(a.shape != (n,) for a in arrs):
        raise ValueError("category vectors must have equal lengths")
    stacked = np.stack(arrs, axis=1)
    uniq, inverse = np.unique(stacked, axis=0, return_inverse=True)
    labels = [tuple(int(x) for x in row) for row in uniq]
    return inverse.astype(np.int64) + 1, labels


def table_plain(x_cats: np.ndarray, y_cats: np.ndarray,
                x_labels: Sequence[Hashable] | None = None,
                y_labels: Sequence[Hashable] | None = None) -> ContingencyTable:
    """Integer cross-counts of two aligned ordinal vectors."""
    x = np.asarray(x_cats)
    y = np.asarray(y_cats)
    if x.shape != y.shape:
        raise ValueError("category vectors must have equal lengths")
    ux, xinv = np.unique(x, return_inverse=True)
    uy, yinv = np.unique(y, return_inverse=True)
    cells = np.zeros((ux.size, uy.size))
    np.add.at(cells, (xinv, yinv), 1.0)
    rl = tuple(x_labels) if x_labels is not None else tuple(int(v) for v in ux)
    cl = tuple(y_labels) if y_labels is not None else tuple(int(v) for v in uy)
    if x_labels is not None and len(rl) != ux.size:
        raise ValueError("x_labels must cover exactly the observed categories")
    if y_labels is not None and len(cl) != uy.size:
        raise ValueError("y_labels must cover exactly the observed categories")
    return ContingencyTable(rl, cl, cells)


def table_from_binned(binned: np.ndarray, row_cats: np.ndarray,
                      row_labels: Sequence[Hashable] | None = None,
                      col_labels: Sequence[Hashable] | None = None) -> ContingencyTable:
    """Weighted table from per-subject binned masses (n x k) and row codes.

    The fast path behind :func:`table_from_weights`: ``binned[i, b]`` is the
    redistributed mass of subject ``i`` in time bin ``b``.
    """
    B = np.asarray(binned, dtype=float)
    cats = np.asarray(row_cats)
    if cats.shape[0] != B.shape[0]:
        raise ValueError("row_cats must align with binned rows")
    uniq, inv = np.unique(cats, return_inverse=True)
    k = B.shape[1]
    flat = inv[:, None] * k + np.arange(k)[None, :]
    cells = np.bincount(flat.ravel(), weights=B.ravel(),
                        minlength=uniq.size * k).reshape(uniq.size, k)
    rl = tuple(row_labels) if row_labels is not None else tuple(int(v) for v in uniq)
    cl = tuple(col_labels) if col_labels is not None else tuple(range(1, k + 1))
    return ContingencyTable(rl, cl, cells)


def table_from_weights(W: WeightMatrix, row_cats: np.ndarray,
                       time_scheme: BinningScheme,
                       row_labels: Sequence[Hashable] | None = None) -> ContingencyTable:
    """Weighted table: categories (rows) by time bins (columns).

    ``row_cats`` must align with the weight-matrix rows.  The column axis is
    grouped by ``time_scheme``; cell (a, b) accumulates all weight that
    subjects of category ``a`` place on event times in bin ``b``.  The table
    total equals the number of rows (each row carries unit mass).
    """
    cats = np.asarray(row_cats)
    if cats.shape[0] != W.weights.shape[0]:
        raise ValueError("row_cats length must equal the weight-matrix row count")
    col_bin, _ = categorize(W.col_times, time_scheme)
    k = time_scheme.nbins
    binned = np.zeros((W.weights.shape[0], k))
    for b in range(1, k + 1):
        sel = col_bin == b
        if sel.any():
            binned[:, b - 1] = W.weights[:, sel].sum(axis=1)
    return table_from_binned(binned, cats, row_labels=row_labels,
                             col_labels=tuple(range(1, k + 1)))


def censor_cross_table(dataset: Dataset, time_scheme: BinningScheme
                       ) -> tuple[ContingencyTable, ContingencyTable, ContingencyTable]:
    """Summed censoring-vs-event-time table plus its two addends.

    The first addend distributes each censored subject's mass over the event
    times to its right (rows: censoring-time bins).  The second does the
    symmetric construction for event subjects over observed censoring times
    and is transposed so its rows are censoring-time bins as well.  Returns
    ``(summed, censored_part, event_part_transposed)``.
    """
    k = time_scheme.nbins
    labels = tuple(range(1, k + 1))

    wc = build_cross_weight_matrix(dataset, "C-rows")
    c_rows_bin, _ = categorize(wc.row_y, time_scheme)
    c_part = table_from_weights(wc, c_rows_bin, time_scheme)
    c_cells = _expand(c_part, labels, labels)

    wt = build_cross_weight_matrix(dataset, "T-rows")
    t_rows_bin, _ = categorize(wt.row_y, time_scheme)
    t_part = table_from_weights(wt, t_rows_bin, time_scheme)
    t_cells = _expand(t_part, labels, labels).T  # rows become censoring bins

    c_tab = ContingencyTable(labels, labels, c_cells)
    t_tab = ContingencyTable(labels, labels, t_cells)
    summed = ContingencyTable(labels, labels, c_cells + t_cells)
    return summed, c_tab, t_tab


def _expand(table: ContingencyTable, row_labels: tuple, col_labels: tuple) -> np.ndarray:
    """Embed a table into the full label grid (missing categories -> 0)."""
    out = np.zeros((len(row_labels), len(col_labels)))
    ri = {lab: i for i, lab in enumerate(row_labels)}
    ci = {lab: j for j, lab in enumerate(col_labels)}
    for i, rl in enumerate(table.row_labels):
        for j, cl in enumerate(table.col_labels):
            out[ri[rl], ci[cl]] = table.cells[i, j]
    return out
