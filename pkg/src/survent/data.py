"""Data model and CSV ingestion for right-censored time-to-event samples.

A sample is a collection of subjects, each carrying an observed time ``y``
(the minimum of the event time and the censoring time), a status flag
``delta`` (1 = event observed, 0 = right-censored) and a fixed-length
covariate vector.  Everything downstream consumes the immutable
:class:`Dataset` built here.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np


class ConfigError(ValueError):
    """Column-role configuration does not match the input file."""


class ParseError(ValueError):
    """A cell could not be parsed; carries the 1-based data row index."""

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row


class MissingValueError(ValueError):
    """Selected columns contain empty cells; carries the offending rows."""

    def __init__(self, rows: Sequence[int]):
        preview = ", ".join(str(r) for r in rows[:20])
        more = "" if len(rows) <= 20 else f" (+{len(rows) - 20} more)"
        super().__init__(f"missing values in data rows: {preview}{more}")
        self.rows = list(rows)


@dataclass(frozen=True)
class SurvivalRecord:
    """One subject: identifier, observed time, status, covariates."""

    id: str
    y: float
    delta: int
    covariates: tuple[float, ...]


@dataclass(frozen=True)
class ColumnConfig:
    """Maps CSV columns to roles, with optional explicit bin edges.

    ``bins`` maps a feature name to an explicit, strictly increasing list of
    bin edges used instead of an automatic scheme. ``kinds`` optionally tags
    features as ``"continuous"`` or ``"categorical"``.
    """

    time: str
    status: str
    features: tuple[str, ...]
    id: str | None = None
    kinds: Mapping[str, str] | None = None
    bins: Mapping[str, Sequence[float]] | None = None
    version: int = 1

    @classmethod
    def from_json(cls, path: str | Path) -> "ColumnConfig":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: Mapping) -> "ColumnConfig":
        version = int(raw.get("version", 1))
        if version != 1:
            raise ConfigError(f"unsupported config version {version}")
        for key in ("time", "status", "features"):
            if key not in raw:
                raise ConfigError(f"config is missing required key {key!r}")
        return cls(
            time=str(raw["time"]),
            status=str(raw["status"]),
            features=tuple(str(f) for f in raw["features"]),
            id=raw.get("id"),
            kinds=dict(raw["kinds"]) if raw.get("kinds") else None,
            bins={k: list(map(float, v)) for k, v in raw["bins"].items()}
            if raw.get("bins")
            else None,
            version=version,
        )

    def to_dict(self) -> dict:
        out: dict = {
            "version": self.version,
            "time": self.time,
            "status": self.status,
            "features": list(self.features),
        }
        if self.id is not None:
            out["id"] = self.id
        if self.kinds:
            out["kinds"] = dict(self.kinds)
        if self.bins:
            out["bins"] = {k: list(v) for k, v in self.bins.items()}
        return out


class Dataset:
    """Immutable columnar sample of survival records.

    Parameters
    ----------
    ids : sequence of str
        Subject identifiers; autogenerated row numbers when omitted.
    y : array of float
        Observed times, nonnegative and finite.
    delta : array of int
        1 for an observed event, 0 for a right-censored subject.
    X : 2-D array, shape (n, n_features)
        Covariate matrix (may be empty with 0 columns).
    feature_names, feature_kinds
        Column labels and per-feature "continuous"/"categorical" tags.
    hidden : mapping of name -> array
        Extra per-subject columns that are not features (used by the
        simulator to carry the true event and censoring times).
    meta : dict
        Free-form provenance, e.g. the promoted-subject id.
    """

    def __init__(
        self,
        y: Sequence[float],
        delta: Sequence[int],
        X: np.ndarray | Sequence[Sequence[float]] | None = None,
        feature_names: Sequence[str] | None = None,
        ids: Sequence[str] | None = None,
        feature_kinds: Sequence[str] | None = None,
        hidden: Mapping[str, np.ndarray] | None = None,
        meta: Mapping | None = None,
    ):
        self.y = np.asarray(y, dtype=float)
        self.delta = np.asarray(delta, dtype=np.int8)
        n = self.y.shape[0]
        if self.y.ndim != 1 or self.delta.shape != (n,):
            raise ValueError("y and delta must be 1-D and of equal length")
        if not np.all(np.isfinite(self.y)) or np.any(self.y < 0):
            raise ValueError("observed times must be finite and nonnegative")
        if not np.isin(self.delta, (0, 1)).all():
            raise ValueError("status must be 0 (censored) or 1 (event)")
        if X is None:
            X = np.empty((n, 0))
        self.X = np.asarray(X, dtype=float)
        if self.X.ndim != 2 or self.X.shape[0] != n:
            raise ValueError("covariate matrix must be 2-D with one row per record")
        if feature_names is None:
            feature_names = [f"V{j + 1}" for j in range(self.X.shape[1])]
        self.feature_names = tuple(str(f) for f in feature_names)
        if len(self.feature_names) != self.X.shape[1]:
            raise ValueError("feature_names length must match covariate columns")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise ValueError("feature names must be unique")
        if feature_kinds is None:
            feature_kinds = ["continuous"] * self.X.shape[1]
        self.feature_kinds = tuple(feature_kinds)
        if len(self.feature_kinds) != self.X.shape[1]:
            raise ValueError("feature_kinds length must match covariate columns")
        self.ids = (
            tuple(str(i) for i in ids)
            if ids is not None
            else tuple(str(i) for i in range(n))
        )
        if len(self.ids) != n:
            raise ValueError("ids length must match record count")
        if len(set(self.ids)) != n:
            raise ValueError("record ids must be unique")
        self.hidden = {k: np.asarray(v) for k, v in (hidden or {}).items()}
        for k, v in self.hidden.items():
            if v.shape[0] != n:
                raise ValueError(f"hidden column {k!r} has wrong length")
        self.meta = dict(meta or {})
        self.y.setflags(write=False)
        self.delta.setflags(write=False)
        self.X.setflags(write=False)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def n_u(self) -> int:
        return int(self.delta.sum())

    @property
    def n_c(self) -> int:
        return self.n - self.n_u

    @property
    def records(self) -> list[SurvivalRecord]:
        return [
            SurvivalRecord(self.ids[i], float(self.y[i]), int(self.delta[i]),
                           tuple(self.X[i]))
            for i in range(self.n)
        ]

    def feature(self, name: str) -> np.ndarray:
        try:
            j = self.feature_names.index(name)
        except ValueError:
            raise KeyError(f"unknown feature {name!r}") from None
        return self.X[:, j]

    def subset(self, mask: np.ndarray, meta_update: Mapping | None = None) -> "Dataset":
        mask = np.asarray(mask)
        if mask.dtype != bool:
            idx = mask
        else:
            idx = np.flatnonzero(mask)
        # promotion bookkeeping is row-positional; subsets start unannotated
        meta = {k: v for k, v in self.meta.items()
                if k not in ("promoted_index", "promoted_id")}
        if meta_update:
            meta.update(meta_update)
        return Dataset(
            y=self.y[idx],
            delta=self.delta[idx],
            X=self.X[idx],
            feature_names=self.feature_names,
            ids=[self.ids[i] for i in np.atleast_1d(idx)],
            feature_kinds=self.feature_kinds,
            hidden={k: v[idx] for k, v in self.hidden.items()},
            meta=meta,
        )

    def promote_largest_censored(self) -> "Dataset":
        """Treat the trailing censored observation as an event.

        Standard convention before product-limit estimation and weight
        redistribution: the record that sorts last (largest observed time;
        events before censorings at ties, then input order) has nothing to
        its right to receive its mass, so when it is censored it is
        converted to an event.  A no-op (returning ``self``) when that
        record is already an event or a promotion was applied before.  The
        promoted row is recorded in ``meta`` under ``promoted_index`` /
        ``promoted_id``.
        """
        if self.n == 0:
            raise ValueError("empty dataset")
        delta = np.array(self.delta)
        promoted: list[int] = []
        # a promoted record re-sorts ahead of censored records tied at the
        # same time, which can expose another trailing censored record;
        # iterate until the trailing ordered record is an event
        while True:
            order = np.lexsort((np.arange(self.n), 1 - delta, self.y))
            last = int(order[-1])
            if delta[last] == 1:
                break
            delta[last] = 1
            promoted.append(last)
        if not promoted:
            return self
        return Dataset(
            y=self.y,
            delta=delta,
            X=self.X,
            feature_names=self.feature_names,
            ids=self.ids,
            feature_kinds=self.feature_kinds,
            hidden=self.hidden,
            meta={**self.meta,
                  "promoted_index": tuple(promoted),
                  "promoted_id": tuple(self.ids[i] for i in promoted)},
        )

    def original_delta(self) -> np.ndarray:
        """Status vector with any promotion undone."""
        out = np.array(self.delta)
        promoted = self.meta.get("promoted_index")
        if promoted is not None:
            idx = promoted if isinstance(promoted, tuple) else (promoted,)
            for i in idx:
                out[int(i)] = 0
        return out

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id", "time", "status", *self.feature_names])
            for i in range(self.n):
                writer.writerow(
                    [self.ids[i], repr(float(self.y[i])), int(self.delta[i]),
                     *(repr(float(v)) for v in self.X[i])]
                )

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return (f"Dataset(n={self.n}, events={self.n_u}, censored={self.n_c}, "
                f"features={len(self.feature_names)})")


def _parse_cell(text: str, column: str, row: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(
            f"non-numeric value {text!r} in column {column!r} at data row {row}",
            row=row,
        ) from None


def ingest_csv(path: str | Path, config: ColumnConfig | Mapping | str | Path) -> Dataset:
    """Read a CSV file (RFC-4180, UTF-8, header row required) into a Dataset.

    ``config`` names the time, status and feature columns (a
    :class:`ColumnConfig`, a dict, or a path to a JSON config file).  Rows
    with missing values in any selected column are rejected, listing the
    offending rows; incomplete subjects must be resolved upstream.
    """
    if isinstance(config, (str, Path)):
        config = ColumnConfig.from_json(config)
    elif not isinstance(config, ColumnConfig):
        config = ColumnConfig.from_dict(config)

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file: no header row") from None
        rows = list(reader)

    colidx: dict[str, int] = {name: i for i, name in enumerate(header)}
    wanted = [config.time, config.status, *config.features]
    if config.id is not None:
        wanted.append(config.id)
    for name in wanted:
        if name not in colidx:
            raise ConfigError(f"column {name!r} not found in {path}")

    missing_rows = []
    for r, row in enumerate(rows, start=1):
        for name in wanted:
            i = colidx[name]
            if i >= len(row) or row[i].strip() == "":
                missing_rows.append(r)
                break
    if missing_rows:
        raise MissingValueError(missing_rows)

    n = len(rows)
    y = np.empty(n)
    delta = np.empty(n, dtype=np.int8)
    X = np.empty((n, len(config.features)))
    ids = []
    for r, row in enumerate(rows, start=1):
        y[r - 1] = _parse_cell(row[colidx[config.time]], config.time, r)
        sval = _parse_cell(row[colidx[config.status]], config.status, r)
        if sval not in (0.0, 1.0):
            raise ParseError(
                f"status must be 0 or 1, got {sval!r} at data row {r}", row=r
            )
        delta[r - 1] = int(sval)
        for j, fname in enumerate(config.features):
            X[r - 1, j] = _parse_cell(row[colidx[fname]], fname, r)
        ids.append(row[colidx[config.id]] if config.id is not None else str(r - 1))

    kinds = None
    if config.kinds:
        kinds = [config.kinds.get(f, "continuous") for f in config.features]
    return Dataset(
        y=y,
        delta=delta,
        X=X,
        feature_names=config.features,
        ids=ids,
        feature_kinds=kinds,
        meta={"source": str(path)},
    )


def dataset_from_records(records: Iterable[SurvivalRecord],
                         feature_names: Sequence[str]) -> Dataset:
    recs = list(records)
    return Dataset(
        y=[r.y for r in recs],
        delta=[r.delta for r in recs],
        X=[list(r.covariates) for r in recs],
        feature_names=feature_names,
        ids=[r.id for r in recs],
    )
