"""Major-factor selection over feature sets of order 1 to 3.

For every feature set, the response's conditional entropy is evaluated on
the weighted contingency table, together with the uncertainty-reduction
bookkeeping: the plain drop, the successive drop against the best sub-set,
and (for sets of two or more) the ecological difference that decides
whether members can act concurrently.  Reliability of an observed
conditional entropy is judged against nulls built from synthetic
uniform-noise features pushed through the identical pipeline.

Pairwise association between covariates themselves is summarized by a
symmetric mutual-conditional-entropy score,
``max(H[A|B]/H[A], H[B|A]/H[B])`` on the plain table (0 for duplicated
features, near 1 for independent ones).  This definition is a convention of
this library; see the README note.
"""

from __future__ import annotations

import itertools
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Mapping, Sequence

import numpy as np

from .binning import BinningScheme, DegenerateRangeError, categorize, equal_width_bins
from .contingency import ContingencyTable, fuse_categories, table_from_binned, table_plain
from .data import Dataset
from .entropy import (
    _entropy_of_counts,
    conditional_entropy,
    conditional_mutual_information,
    ecological_effect,
    interacting_flag,
    mutual_information,
)
from .redistribution import WeightMatrix, binned_row_masses


@dataclass(frozen=True)
class CategorizedFeatures:
    """Per-feature ordinal codes (1-based) aligned to a dataset."""

    names: tuple[str, ...]
    codes: np.ndarray  # n x K, int64
    levels: Mapping[str, tuple]
    schemes: Mapping[str, BinningScheme | None]

    def column(self, name: str) -> np.ndarray:
        return self.codes[:, self.names.index(name)]

    def n_levels(self, name: str) -> int:
        return len(self.levels[name])


def categorize_features(dataset: Dataset, n_bins: int = 4,
                        schemes: Mapping[str, BinningScheme] | None = None
                        ) -> CategorizedFeatures:
    """Categorize every covariate of a dataset.

    Continuous features get ``n_bins`` equal-width bins over their observed
    range unless an explicit scheme is supplied; categorical features map
    their sorted distinct values to codes 1..m.  A constant feature
    collapses to a single category rather than erroring, so that
    sub-collection analyses can reuse global feature lists.
    """
    schemes = dict(schemes or {})
    codes = np.zeros((dataset.n, len(dataset.feature_names)), dtype=np.int64)
    levels: dict[str, tuple] = {}
    out_schemes: dict[str, BinningScheme | None] = {}
    for j, name in enumerate(dataset.feature_names):
        col = dataset.X[:, j]
        if dataset.feature_kinds[j] == "categorical" and name not in schemes:
            uniq, inv = np.unique(col, return_inverse=True)
            codes[:, j] = inv + 1
            levels[name] = tuple(range(1, uniq.size + 1))
            out_schemes[name] = None
            continue
        scheme = schemes.get(name)
        if scheme is None:
            try:
                scheme = equal_width_bins(col, n_bins)
            except DegenerateRangeError:
                codes[:, j] = 1
                levels[name] = (1,)
                out_schemes[name] = None
                continue
        codes[:, j], _ = categorize(col, scheme)
        levels[name] = tuple(range(1, scheme.nbins + 1))
        out_schemes[name] = scheme
    return CategorizedFeatures(tuple(dataset.feature_names), codes, levels,
                               out_schemes)


@dataclass
class AssociationRecord:
    """One ranked feature set with its entropy bookkeeping."""

    features: tuple[str, ...]
    ce: float
    ce_drop: float
    sce_drop: float
    ecological: float | None = None
    ecological_flag: bool | None = None
    interacting: bool | None = None
    reliability_p: float | None = None

    @property
    def label(self) -> str:
        return "_".join(self.features)


@dataclass
class MFSReport:
    """Ranked records for one feature-set order, ascending by CE."""

    order: int
    records: list[AssociationRecord]
    h_response: float
    dataset_label: str
    n: int
    n_u: int

    def top(self, m: int = 10) -> list[AssociationRecord]:
        return self.records[:m]

    def record_for(self, features: Sequence[str]) -> AssociationRecord:
        key = tuple(sorted(features))
        for rec in self.records:
            if tuple(sorted(rec.features)) == key:
                return rec
        raise KeyError(f"no record for feature set {features!r}")

    def to_rows(self) -> list[dict]:
        rows = []
        for rec in self.records:
            rows.append({
                "features": rec.label,
                "ce": rec.ce,
                "ce_drop": rec.ce_drop,
                "sce_drop": rec.sce_drop,
                "ecological": rec.ecological,
                "ecological_flag": rec.ecological_flag,
                "interacting": rec.interacting,
                "reliability_p": rec.reliability_p,
            })
        return rows

    def to_csv(self, path: str | Path) -> None:
        import csv

        rows = self.to_rows()
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)

    def to_json_dict(self) -> dict:
        return {
            "order": self.order,
            "dataset": self.dataset_label,
            "n": self.n,
            "n_events": self.n_u,
            "h_response": self.h_response,
            "records": self.to_rows(),
        }


def _response_masses(dataset: Dataset, time_scheme: BinningScheme,
                     weights: WeightMatrix | None) -> np.ndarray:
    """Per-subject response-bin masses aligned to dataset order."""
    if weights is None:
        B, _ = binned_row_masses(dataset, time_scheme)
        return B
    col_bin, _ = categorize(weights.col_times, time_scheme)
    k = time_scheme.nbins
    B = np.zeros((weights.weights.shape[0], k))
    for b in range(1, k + 1):
        sel = col_bin == b
        if sel.any():
            B[:, b - 1] = weights.weights[:, sel].sum(axis=1)
    # weight rows are sorted by time; map back to dataset order via ids
    pos = {rid: i for i, rid in enumerate(weights.row_ids)}
    idx = np.array([pos[rid] for rid in dataset.ids])
    return B[idx]


def run_mfs(dataset: Dataset, time_scheme: BinningScheme,
            cats: CategorizedFeatures | None = None,
            max_order: int = 2,
            weights: WeightMatrix | None = None,
            features: Sequence[str] | None = None,
            interaction_factor: float = 3.0,
            n_bins: int = 4,
            label: str = "",
            size_guard: bool = True,
            workers: int = 1) -> dict[int, MFSReport]:
    """Evaluate all feature sets up to ``max_order`` and rank them.

    Orders above 3 are rejected: with composite categories multiplying per
    added feature, plug-in conditional entropies on realistic event counts
    lose meaning beyond triplets.  Records come back sorted ascending by
    conditional entropy; the ordering is deterministic and independent of
    ``workers``.
    """
    if not 1 <= max_order <= 3:
        raise ValueError("max_order must be 1, 2 or 3")
    if cats is None:
        cats = categorize_features(dataset, n_bins=n_bins)
    names = list(features) if features is not None else list(cats.names)
    B = _response_masses(dataset, time_scheme, weights)
    h_response = _entropy_of_counts(B.sum(axis=0))
    time_labels = tuple(range(1, time_scheme.nbins + 1))

    code_of = {f: cats.column(f) for f in names}
    tables: dict[tuple[str, ...], ContingencyTable] = {}
    ces: dict[tuple[str, ...], float] = {}
    drops: dict[tuple[str, ...], float] = {}

    def evaluate(fset: tuple[str, ...]) -> tuple[tuple[str, ...], ContingencyTable, float]:
        if len(fset) == 1:
            fused = code_of[fset[0]]
            labels = None
        else:
            fused, tuples = fuse_categories([code_of[f] for f in fset])
            labels = tuples
        table = table_from_binned(B, fused, row_labels=labels,
                                  col_labels=time_labels)
        ce, _ = conditional_entropy(table)
        return fset, table, ce

    reports: dict[int, MFSReport] = {}
    for order in range(1, max_order + 1):
        sets = [tuple(c) for c in itertools.combinations(names, order)]
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(evaluate, sets))
        else:
            results = [evaluate(s) for s in sets]

        if size_guard:
            worst = max((r[1].cells.shape[0] for r in results), default=0)
            if dataset.n_u < 10 * worst:
                warnings.warn(
                    f"order-{order} composite categories reach {worst} levels "
                    f"with only {dataset.n_u} events; plug-in conditional "
                    "entropies may be unstable",
                    stacklevel=2,
                )

        records = []
        for fset, table, ce in results:
            tables[fset] = table
            ces[fset] = ce
            drop = h_response - ce
            drops[fset] = drop
            if order == 1:
                rec = AssociationRecord(fset, ce, drop, sce_drop=drop)
            elif order == 2:
                a, b = fset
                best_sub = max(drops[(a,)], drops[(b,)])
                sce = drop - best_sub
                minor = min(drops[(a,)], drops[(b,)])
                i_ab = mutual_information(
                    table_plain(code_of[a], code_of[b]))
                i_ab_y = conditional_mutual_information(
                    tables[(a,)], tables[(b,)], table)
                eco, eco_flag = ecological_effect(i_ab_y, i_ab)
                rec = AssociationRecord(
                    fset, ce, drop, sce,
                    ecological=eco, ecological_flag=eco_flag,
                    interacting=interacting_flag(sce, minor, eco_flag,
                                                 interaction_factor),
                )
            else:
                pairs = list(itertools.combinations(fset, 2))
                best_pair = max(pairs, key=lambda p: drops[p])
                sce = drop - drops[best_pair]
                added = next(f for f in fset if f not in best_pair)
                # ecological difference over the split (best pair, remainder)
                eco = drop - drops[best_pair] - drops[(added,)]
                eco_flag = eco > 1e-12
                rec = AssociationRecord(
                    fset, ce, drop, sce,
                    ecological=eco, ecological_flag=eco_flag,
                    interacting=interacting_flag(sce, drops[(added,)],
                                                 eco_flag, interaction_factor),
                )
            records.append(rec)
        records.sort(key=lambda r: (r.ce, r.features))
        reports[order] = MFSReport(order, records, h_response,
                                   label or dataset.meta.get("subcollection", ""),
                                   dataset.n, dataset.n_u)
    return reports


@dataclass
class ReliabilityNull:
    """Empirical null of conditional entropies from synthetic noise features."""

    ces: np.ndarray
    n_rep: int
    n_bins: int
    anchor: tuple[str, ...] = ()

    def p_value(self, ce_observed: float) -> float:
        """Fraction of null CEs at or below the observed one (small means
        the observed reduction is unlikely under pure noise)."""
        return float(np.mean(self.ces <= ce_observed))


def reliability_null(dataset: Dataset, time_scheme: BinningScheme,
                     cats: CategorizedFeatures | None = None,
                     anchor_set: Sequence[str] = (),
                     n_rep: int = 200,
                     n_bins: int = 4,
                     seed: int = 0,
                     weights: WeightMatrix | None = None) -> ReliabilityNull:
    """Null CE distribution from ``n_rep`` synthetic uniform features.

    Each replicate draws a fresh Uniform[0, 1] feature, bins it like a real
    covariate (``n_bins`` equal-width bins), optionally fuses it with the
    anchor features, and evaluates the conditional entropy on the same
    weight structure as the observed analysis.  Replicate ``i`` owns the RNG
    substream spawned at index ``i``, so results do not depend on execution
    order.
    """
    if n_rep < 1:
        raise ValueError("n_rep must be at least 1")
    anchor_set = tuple(anchor_set)
    if anchor_set:
        if cats is None:
            cats = categorize_features(dataset, n_bins=n_bins)
        anchor_codes = [cats.column(f) for f in anchor_set]
    else:
        anchor_codes = []
    B = _response_masses(dataset, time_scheme, weights)
    streams = np.random.SeedSequence(seed).spawn(n_rep)
    out = np.empty(n_rep)
    for i in range(n_rep):
        rng = np.random.default_rng(streams[i])
        noise = rng.uniform(0.0, 1.0, dataset.n)
        codes, _ = categorize(noise, equal_width_bins(noise, n_bins))
        if anchor_codes:
            codes, _ = fuse_categories([codes, *anchor_codes])
        table = table_from_binned(B, codes)
        out[i], _ = conditional_entropy(table)
    return ReliabilityNull(out, n_rep=n_rep, n_bins=n_bins, anchor=anchor_set)


def subdivide(dataset: Dataset, cats: CategorizedFeatures,
              feature: str) -> list[tuple[Hashable, Dataset]]:
    """Partition a dataset by one feature's categories.

    Empty categories are omitted with a warning.  Sub-datasets carry a
    ``subcollection`` meta tag and start without promotion bookkeeping; the
    trailing-censored promotion re-applies locally whenever a weight matrix
    or product-limit estimate is built on them.
    """
    column = cats.column(feature)
    out = []
    for level in cats.levels[feature]:
        mask = column == level
        if not mask.any():
            warnings.warn(f"{feature}={level} has no records; omitted",
                          stacklevel=2)
            continue
        sub = dataset.subset(mask, meta_update={
            "subcollection": f"{feature}={level}"})
        out.append((level, sub))
    return out


@dataclass
class MCEResult:
    names: tuple[str, ...]
    matrix: np.ndarray
    threshold: float

    @property
    def edges(self) -> list[tuple[str, str, float]]:
        """Feature pairs whose score falls below the linkage threshold."""
        out = []
        for i, j in itertools.combinations(range(len(self.names)), 2):
            if self.matrix[i, j] < self.threshold:
                out.append((self.names[i], self.names[j],
                            float(self.matrix[i, j])))
        return out

    def to_csv(self, path: str | Path) -> None:
        import csv

        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["", *self.names])
            for name, row in zip(self.names, self.matrix):
                writer.writerow([name, *(f"{v:.6f}" for v in row)])


def mce_matrix(cats: CategorizedFeatures,
               features: Sequence[str] | None = None,
               threshold: float = 0.97) -> MCEResult:
    """Symmetric covariate-association matrix on plain tables.

    Score of a pair is ``max(H[A|B]/H[A], H[B|A]/H[B])``: 0 when either
    determines the other, near 1 when independent.  Pairs involving a
    zero-entropy (constant) feature are undefined and reported as 1.
    """
    names = tuple(features) if features is not None else cats.names
    if len(names) < 2:
        raise ValueError("need at least 2 features")
    m = len(names)
    out = np.zeros((m, m))
    ents = {}
    for f in names:
        ents[f] = _entropy_of_counts(
            np.bincount(cats.column(f))[1:].astype(float))
    for i, j in itertools.combinations(range(m), 2):
        a, b = names[i], names[j]
        if ents[a] <= 0 or ents[b] <= 0:
            out[i, j] = out[j, i] = 1.0
            continue
        tab = table_plain(cats.column(a), cats.column(b))
        h_b_given_a, _ = conditional_entropy(tab)
        h_a_given_b, _ = conditional_entropy(tab.transpose())
        out[i, j] = out[j, i] = max(h_a_given_b / ents[a],
                                    h_b_given_a / ents[b])
    return MCEResult(names, out, threshold)


@dataclass(frozen=True)
class ExpansionDot:
    """One category's dot in a conditional-entropy expansion plot."""

    series: str
    category: tuple[int, ...]
    rescaled_ce: float
    raw_ce: float
    mass: float
    dominant_response: int


@dataclass
class CEExpansion:
    base: str
    extensions: tuple[tuple[str, ...], ...]
    h_response: float
    dots: list[ExpansionDot]

    def series(self, name: str) -> list[ExpansionDot]:
        return [d for d in self.dots if d.series == name]

    def to_csv(self, path: str | Path) -> None:
        import csv

        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["series", "category", "rescaled_ce", "raw_ce",
                             "mass", "dominant_response"])
            for d in self.dots:
                writer.writerow([d.series, "_".join(map(str, d.category)),
                                 repr(d.rescaled_ce), repr(d.raw_ce),
                                 repr(d.mass), d.dominant_response])


def ce_expansion(dataset: Dataset, time_scheme: BinningScheme,
                 cats: CategorizedFeatures, base: str,
                 extensions: Sequence[str | Sequence[str]] = (),
                 weights: WeightMatrix | None = None) -> CEExpansion:
    """Per-category rescaled conditional entropies for a base feature and
    its refinements, within one (sub-)collection.

    Every category of ``base``, and every observed composite category of
    ``(base, extension...)``, contributes a dot: the row's entropy divided
    by the response's marginal entropy in this collection, together with
    the row mass and the dominant response category.
    """
    B = _response_masses(dataset, time_scheme, weights)
    h_resp = _entropy_of_counts(B.sum(axis=0))
    if h_resp <= 0:
        raise ValueError("response has zero entropy in this collection")
    dots: list[ExpansionDot] = []
    norm_exts = tuple(
        (ext,) if isinstance(ext, str) else tuple(ext) for ext in extensions
    )

    def add_series(series_feats: tuple[str, ...]) -> None:
        if len(series_feats) == 1:
            codes = cats.column(series_feats[0])
            labels = [(int(v),) for v in np.unique(codes)]
        else:
            codes, labels = fuse_categories(
                [cats.column(f) for f in series_feats])
        table = table_from_binned(B, codes, row_labels=labels)
        _, per_row = conditional_entropy(table)
        masses = table.row_sums()
        name = "_".join(series_feats)
        for i, lab in enumerate(table.row_labels):
            if masses[i] <= 0:
                continue
            dominant = int(np.argmax(table.cells[i])) + 1
            dots.append(ExpansionDot(
                series=name,
                category=tuple(lab),
                rescaled_ce=float(per_row[i] / h_resp),
                raw_ce=float(per_row[i]),
                mass=float(masses[i]),
                dominant_response=dominant,
            ))

    add_series((base,))
    for ext in norm_exts:
        add_series((base, *ext))
    return CEExpansion(base, norm_exts, h_resp, dots)


@dataclass(frozen=True)
class CodeID:
    """A deterministic label: feature-category path plus response category."""

    path: tuple[tuple[str, int], ...]
    response_category: int
    ce_at_leaf: float
    mass: float

    def __str__(self) -> str:
        steps = "-".join(f"{f}-{c}" for f, c in self.path)
        return f"{steps}-T{self.response_category}"


def assign_code_ids(expansion: CEExpansion, threshold: float = 0.05,
                    prefix: Sequence[tuple[str, int]] = ()) -> list[CodeID]:
    """Issue code-IDs for every expansion cell at or below the CE threshold.

    ``threshold`` applies to the rescaled conditional entropy shown in the
    expansion (0 keeps only exactly-pure cells).  ``prefix`` prepends the
    sub-collection's own (feature, category) steps.
    """
    out = []
    for dot in expansion.dots:
        if dot.rescaled_ce <= threshold:
            feats = dot.series.split("_")
            path = tuple(prefix) + tuple(zip(feats, dot.category))
            out.append(CodeID(path, dot.dominant_response,
                              dot.rescaled_ce, dot.mass))
    return out
