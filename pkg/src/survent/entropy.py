"""Shannon-entropy machinery on contingency tables.

All entropies are in nats.  Estimates are plug-in (no bias correction), with
0 * log 0 = 0 by continuity; zero-mass rows contribute nothing to weighted
averages.  Mutual information is clamped at zero against floating-point
rounding, with the raw value available on request.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .contingency import ContingencyTable


def _entropy_of_counts(v: np.ndarray) -> float:
    """Entropy of the normalized vector, for nonnegative weights."""
    total = v.sum()
    if total <= 0:
        return 0.0
    pos = v[v > 0]
    return float(math.log(total) - (pos * np.log(pos)).sum() / total)


def shannon(p: Sequence[float], *, atol: float = 1e-9) -> float:
    """Entropy of a probability vector, validating normalization."""
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise ValueError("probabilities must be nonnegative")
    if abs(p.sum() - 1.0) > atol:
        raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
    return _entropy_of_counts(p)


def marginal_entropies(table: ContingencyTable) -> tuple[float, float]:
    """(row-marginal, column-marginal) entropies of a table."""
    return (_entropy_of_counts(table.row_sums()),
            _entropy_of_counts(table.col_sums()))


def conditional_entropy(table: ContingencyTable) -> tuple[float, np.ndarray]:
    """H[col variable | row variable] and the per-row entropies.

    The weighted average, over rows, of each row profile's entropy; weights
    are the row masses.  Zero-mass rows contribute zero and get a per-row
    entropy of 0.
    """
    cells = table.cells
    total = cells.sum()
    if total <= 0:
        raise ValueError("all-zero table")
    row_masses = cells.sum(axis=1)
    per_row = np.array([_entropy_of_counts(r) for r in cells])
    ce = float((row_masses / total) @ per_row)
    return ce, per_row


def mutual_information(table: ContingencyTable, *, clamp: bool = True) -> float:
    """I = H_row + H_col - H_joint, clamped at zero unless ``clamp=False``."""
    cells = table.cells
    if cells.sum() <= 0:
        raise ValueError("all-zero table")
    h_row, h_col = marginal_entropies(table)
    h_joint = _entropy_of_counts(cells.ravel())
    raw = h_row + h_col - h_joint
    return max(raw, 0.0) if clamp else raw


def conditional_mutual_information(table_a: ContingencyTable,
                                   table_b: ContingencyTable,
                                   table_ab: ContingencyTable) -> float:
    """I[A;B | Y] from the three Y-column tables A-vs-Y, B-vs-Y, (A,B)-vs-Y.

    Computed as H[A|Y] + H[B|Y] - H[(A,B)|Y], where each conditional
    entropy conditions on the shared column variable (so the tables are
    transposed before the row-wise weighted average).
    """
    ha_y, _ = conditional_entropy(table_a.transpose())
    hb_y, _ = conditional_entropy(table_b.transpose())
    hab_y, _ = conditional_entropy(table_ab.transpose())
    return ha_y + hb_y - hab_y


def sce_drop(h_response: float, ce_joint: float, *ce_parts: float) -> float:
    """Successive drop: joint uncertainty reduction minus the best
    reduction already achieved by any of the given sub-sets.  May be <= 0.
    """
    if not ce_parts:
        raise ValueError("need at least one sub-set conditional entropy")
    best_part = max(h_response - ce for ce in ce_parts)
    return (h_response - ce_joint) - best_part


def ecological_effect(i_ab_given_y: float, i_ab: float,
                      atol: float = 1e-12) -> tuple[float, bool]:
    """Difference I[A;B|Y] - I[A;B] and whether it is positive.

    A positive difference means the two feature sets become more dependent
    once the response is known, i.e. they can act concurrently.
    """
    diff = i_ab_given_y - i_ab
    return diff, bool(diff > atol)


def interacting_flag(sce: float, ce_drop_minor: float, ecological: bool,
                     factor: float = 3.0) -> bool:
    """Interacting-effect call: the successive drop must reach ``factor``
    times the added member's individual drop, and the ecological condition
    must hold."""
    if not ecological:
        return False
    return sce >= factor * ce_drop_minor


def rescaled_row_ces(table: ContingencyTable) -> np.ndarray:
    """Per-row entropies divided by the column-marginal entropy.

    Values near 1 mean a row profile is as uncertain as the pooled column
    distribution (the row tells you nothing); may exceed 1.
    """
    _, per_row = conditional_entropy(table)
    h_col = _entropy_of_counts(table.col_sums())
    if h_col <= 0:
        raise ValueError("degenerate column marginal")
    return per_row / h_col


def rescaled_col_ces(table: ContingencyTable) -> np.ndarray:
    """Column-wise counterpart of :func:`rescaled_row_ces`."""
    return rescaled_row_ces(table.transpose())
