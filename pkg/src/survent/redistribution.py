"""Kaplan-Meier estimation and redistribute-to-the-right weight matrices.

A censored subject's unit of empirical mass is pushed to the observations on
its right: the mass splits equally over every later point (censored or not),
and the sweep proceeds left to right so that mass parked on a later censored
point is forwarded again.  After the sweep, all mass sits on event times, and
the column totals reproduce the Kaplan-Meier jump sizes.

Two access paths are provided:

* :func:`build_weight_matrix` materializes the dense subject-by-event-time
  matrix via the literal cascade (fine up to a few thousand subjects);
* :func:`iter_weight_rows` / :func:`binned_row_masses` stream rows through
  the equivalent product-limit closed form, for large simulated samples
  where the dense matrix would not fit comfortably in memory.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .binning import BinningScheme, categorize
from .data import Dataset


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous survival step function with initial value 1.

    ``values[i]`` is the survival probability just after ``jump_times[i]``.
    """

    jump_times: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        t = np.asarray(self.jump_times)
        v = np.asarray(self.values)
        if t.shape != v.shape or t.ndim != 1:
            raise ValueError("jump_times and values must be 1-D and aligned")
        if t.size and not np.all(np.diff(t) > 0):
            raise ValueError("jump times must be strictly increasing")
        if np.any(v < -1e-12) or np.any(v > 1 + 1e-12):
            raise ValueError("survival values must lie in [0, 1]")
        if t.size and np.any(np.diff(v) > 1e-12):
            raise ValueError("survival values must be nonincreasing")

    def __call__(self, t: float | np.ndarray) -> np.ndarray | float:
        """Survival probability S(t) = Pr[T > t]."""
        idx = np.searchsorted(self.jump_times, np.asarray(t, dtype=float),
                              side="right")
        vals = np.concatenate(([1.0], self.values))
        out = vals[idx]
        return float(out) if np.isscalar(t) else out

    @property
    def jump_sizes(self) -> np.ndarray:
        vals = np.concatenate(([1.0], self.values))
        return -np.diff(vals)


def _ordered(dataset: Dataset) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Row order for the weight lattice: ascending y, events before
    censorings at ties, then input order."""
    order = np.lexsort((np.arange(dataset.n), 1 - dataset.delta, dataset.y))
    return order, dataset.y[order], dataset.delta[order].astype(np.int8)


def _prepared(dataset: Dataset) -> tuple[Dataset, np.ndarray, np.ndarray, np.ndarray]:
    """Promote the largest censored point, then order."""
    if dataset.n == 0:
        raise ValueError("empty dataset")
    ds = dataset.promote_largest_censored()
    order, ys, deltas = _ordered(ds)
    return ds, order, ys, deltas


def km_estimate(dataset: Dataset) -> StepFunction:
    """Product-limit survival estimate over the ordered sample.

    The largest-censored promotion is applied first, so the estimate always
    reaches zero at the last jump.  Tied event times aggregate into a single
    jump.
    """
    _, _, ys, deltas = _prepared(dataset)
    n = ys.size
    at_risk = n - np.arange(n)
    factors = np.where(deltas == 1, 1.0 - 1.0 / at_risk, 1.0)
    surv = np.cumprod(factors)
    unc = np.flatnonzero(deltas == 1)
    t_unc = ys[unc]
    s_unc = surv[unc]
    # collapse tied event times to the last (smallest) survival value
    keep = np.ones(t_unc.size, dtype=bool)
    keep[:-1] = t_unc[1:] != t_unc[:-1]
    return StepFunction(tuple(t_unc[keep]), tuple(s_unc[keep]))


@dataclass(frozen=True)
class WeightMatrix:
    """Dense redistribution weights: subjects (rows) by event times (cols).

    Rows are ordered by ascending observed time; columns are the ordered
    event times (only event times index columns).  ``row_delta`` is the
    status used in the construction (after promotion), ``row_delta_original``
    the status as observed.
    """

    row_ids: tuple[str, ...]
    row_y: np.ndarray
    row_delta: np.ndarray
    row_delta_original: np.ndarray
    col_times: np.ndarray
    weights: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.weights.shape

    def validate(self, atol: float = 1e-12) -> None:
        """Check the structural invariants; used by the test-suite."""
        w = self.weights
        if np.any(w < -atol):
            raise AssertionError("negative weight")
        if not np.allclose(w.sum(axis=1), 1.0, atol=atol):
            raise AssertionError("row sums deviate from 1")
        for i in range(w.shape[0]):
            if self.row_delta[i] == 1:
                j = int(np.flatnonzero(w[i] > 0)[0])
                if not (abs(w[i, j] - 1.0) <= atol and self.col_times[j] == self.row_y[i]):
                    raise AssertionError("event row is not a unit point mass")
            else:
                bad = (self.col_times <= self.row_y[i]) & (w[i] > atol)
                if bad.any():
                    raise AssertionError("censored row has mass at or left of its time")

    def to_csv(self, path: str | Path) -> None:
        """Emit (row id, column time, weight) triplets for plotting."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["row_id", "col_time", "weight"])
            for i, rid in enumerate(self.row_ids):
                for j in np.flatnonzero(self.weights[i]):
                    writer.writerow([rid, repr(float(self.col_times[j])),
                                     repr(float(self.weights[i, j]))])


def build_weight_matrix(dataset: Dataset) -> WeightMatrix:
    """Dense weight matrix via the left-to-right redistribution cascade."""
    ds, order, ys, deltas = _prepared(dataset)
    n = ys.size
    cens_pos = np.flatnonzero(deltas == 0)
    unc_pos = np.flatnonzero(deltas == 1)
    if unc_pos.size == 0:
        raise ValueError("no events even after promoting the largest censored point")

    # position-space mass for all censored rows at once: start with a unit
    # at each censored position, then sweep censored positions left to right,
    # splitting whatever sits there equally over everything strictly right.
    mass = np.zeros((cens_pos.size, n))
    mass[np.arange(cens_pos.size), cens_pos] = 1.0
    for q in cens_pos:
        share = mass[:, q] / (n - q - 1)  # q < n-1: the last point is never censored here
        mass[:, q + 1 :] += share[:, None]
        mass[:, q] = 0.0

    weights = np.zeros((n, unc_pos.size))
    weights[cens_pos] = mass[:, unc_pos]
    weights[unc_pos, np.arange(unc_pos.size)] = 1.0

    ids_sorted = tuple(ds.ids[i] for i in order)
    orig = ds.original_delta()[order]
    return WeightMatrix(
        row_ids=ids_sorted,
        row_y=ys.copy(),
        row_delta=deltas.copy(),
        row_delta_original=orig.astype(np.int8),
        col_times=ys[unc_pos].copy(),
        weights=weights,
    )


def _km_arrays(dataset: Dataset):
    """Shared pieces for the closed-form paths.

    Returns (order, ys, deltas, surv_at_position, event positions, column
    times, per-column jump sizes, cumulative jumps from each column to the
    right).
    """
    _, order, ys, deltas = _prepared(dataset)
    n = ys.size
    at_risk = n - np.arange(n)
    factors = np.where(deltas == 1, 1.0 - 1.0 / at_risk, 1.0)
    surv = np.cumprod(factors)
    surv_before = np.concatenate(([1.0], surv[:-1]))
    jumps_pos = np.where(deltas == 1, surv_before - surv, 0.0)
    unc_pos = np.flatnonzero(deltas == 1)
    col_times = ys[unc_pos]
    col_jumps = jumps_pos[unc_pos]
    tail = np.concatenate((np.cumsum(col_jumps[::-1])[::-1], [0.0]))
    return order, ys, deltas, surv, unc_pos, col_times, col_jumps, tail


def iter_weight_rows(dataset: Dataset) -> Iterator[tuple[str, int, np.ndarray]]:
    """Stream (id, status, weight row) in ascending-time order.

    Each censored row is produced from the product-limit closed form: the
    weight on event time ``t_j > y_i`` equals the Kaplan-Meier jump at
    ``t_j`` divided by the survival just after ``y_i``.  Equivalent to the
    cascade rows without holding the full matrix.
    """
    ds = dataset.promote_largest_censored()
    order, ys, deltas, surv, unc_pos, col_times, col_jumps, _ = _km_arrays(ds)
    ids_sorted = [ds.ids[i] for i in order]
    col_of_pos = np.cumsum(deltas) - 1
    for p in range(ys.size):
        row = np.zeros(col_times.size)
        if deltas[p] == 1:
            row[col_of_pos[p]] = 1.0
        else:
            start = int(np.searchsorted(col_times, ys[p], side="right"))
            row[start:] = col_jumps[start:] / surv[p]
        yield ids_sorted[p], int(deltas[p]), row


def binned_row_masses(dataset: Dataset,
                      scheme: BinningScheme) -> tuple[np.ndarray, np.ndarray]:
    """Per-subject redistributed mass per time bin, aligned to input order.

    Returns ``(B, col_times)`` with ``B`` of shape (n, nbins); row sums are
    1.  This is the memory-light route to weighted contingency tables: it
    never materializes the subject-by-event-time matrix.
    """
    ds = dataset.promote_largest_censored()
    order, ys, deltas, surv, unc_pos, col_times, col_jumps, tail = _km_arrays(ds)
    n = ys.size
    k = scheme.nbins
    col_bin0, _ = categorize(col_times, scheme)
    col_bin0 = col_bin0 - 1
    # column index where each bin starts / ends (columns sorted by time)
    starts = np.searchsorted(col_bin0, np.arange(k), side="left")
    ends = np.searchsorted(col_bin0, np.arange(k), side="right")

    B = np.zeros((n, k))
    cens = deltas == 0
    if cens.any():
        first_right = np.searchsorted(col_times, ys, side="right")
        denom = np.where(surv > 0, surv, 1.0)
        for b in range(k):
            lo, hi = int(starts[b]), int(ends[b])
            if lo == hi:
                continue
            a = np.clip(first_right, lo, hi)
            B[cens, b] = (tail[a] - tail[hi])[cens] / denom[cens]
    col_of_pos = np.cumsum(deltas) - 1
    ev = np.flatnonzero(deltas == 1)
    B[ev, col_bin0[col_of_pos[ev]]] = 1.0

    out = np.empty_like(B)
    out[order] = B
    return out, col_times


def build_cross_weight_matrix(dataset: Dataset, direction: str) -> WeightMatrix:
    """Cross weight matrices between censoring times and event times.

    ``direction="C-rows"``: rows are the observed censoring times, columns
    the event times; these are exactly the censored rows of the full weight
    matrix.  ``direction="T-rows"``: the symmetric construction with the
    roles of the two ensembles swapped, built by flipping every status flag
    and running the same cascade, then keeping the rows that were events in
    the original data.
    """
    orig_delta = np.asarray(dataset.original_delta())
    if orig_delta.sum() == 0 or orig_delta.sum() == dataset.n:
        raise ValueError("cross matrices need both censored and uncensored records")
    if direction == "C-rows":
        full = build_weight_matrix(dataset)
        keep = np.flatnonzero(full.row_delta_original == 0)
    elif direction == "T-rows":
        flipped = Dataset(
            y=dataset.y,
            delta=1 - orig_delta,
            X=dataset.X,
            feature_names=dataset.feature_names,
            ids=dataset.ids,
            feature_kinds=dataset.feature_kinds,
            meta={k: v for k, v in dataset.meta.items()
                  if k not in ("promoted_index", "promoted_id")},
        )
        full = build_weight_matrix(flipped)
        keep = np.flatnonzero(full.row_delta_original == 0)
    else:
        raise ValueError("direction must be 'C-rows' or 'T-rows'")
    return WeightMatrix(
        row_ids=tuple(full.row_ids[i] for i in keep),
        row_y=full.row_y[keep],
        row_delta=full.row_delta[keep],
        row_delta_original=full.row_delta_original[keep],
        col_times=full.col_times,
        weights=full.weights[keep],
    )
