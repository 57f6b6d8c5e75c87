"""Tabular data ingestion, binary meta-class reduction, and CV splitting.

CSV with a header row is the only ingestion format.  Feature kinds are
inferred per column (numeric if every non-missing token parses as a float,
categorical otherwise) and may be overridden by a JSON schema sidecar of
the form ``{"label": <column name>, "categorical": [<column names>]}``.
Missing numeric values are imputed with the feature mean, missing
categorical values with the feature mode.
"""

from __future__ import annotations

import csv
import itertools
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

NUMERIC = "numeric"
CATEGORICAL = "categorical"


class DataError(ValueError):
    """Raised for unreadable, ragged, empty, or un-imputable inputs."""


@dataclass(frozen=True)
class Dataset:
    """Immutable tabular sample with per-feature kind tags."""

    name: str
    feature_names: tuple[str, ...]
    feature_kinds: tuple[str, ...]
    columns: tuple[np.ndarray, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.columns) != len(self.feature_kinds):
            raise DataError("column count does not match feature kinds")
        m = len(self.labels)
        if m < 1:
            raise DataError("empty dataset")
        for col in self.columns:
            if len(col) != m:
                raise DataError("column length does not match label count")

    @property
    def m(self) -> int:
        return len(self.labels)

    @property
    def arity(self) -> int:
        return len(self.feature_kinds)

    @property
    def classes(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.labels)))

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=int)
        return Dataset(
            name=self.name,
            feature_names=self.feature_names,
            feature_kinds=self.feature_kinds,
            columns=tuple(col[idx] for col in self.columns),
            labels=tuple(self.labels[i] for i in idx),
        )


@dataclass(frozen=True)
class BinaryDataset:
    """A dataset reduced to labels in {-1, +1} via a class-to-sign map."""

    base: Dataset
    label_map: dict[str, int]

    def __post_init__(self):
        seen = set(self.base.labels)
        if not seen.issubset(self.label_map.keys()):
            raise DataError("label_map does not cover every class")
        signs = {self.label_map[c] for c in seen}
        if signs != {-1, +1}:
            raise DataError("both meta-classes must be non-empty")

    @property
    def m(self) -> int:
        return self.base.m

    @property
    def y(self) -> np.ndarray:
        return np.array([self.label_map[c] for c in self.base.labels], dtype=np.float64)

    def subset(self, indices) -> "BinaryDataset":
        return BinaryDataset(self.base.subset(indices), dict(self.label_map))


@dataclass(frozen=True)
class SplitPlan:
    """Deterministic fold assignments: one fold index per instance per trial."""

    trials: int
    folds: int
    seed: int
    assignments: np.ndarray  # shape (trials, m), int fold indices

    def train_test_indices(self, trial: int, fold: int) -> tuple[np.ndarray, np.ndarray]:
        row = self.assignments[trial]
        test = np.flatnonzero(row == fold)
        train = np.flatnonzero(row != fold)
        return train, test


def _parses_as_float(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def _impute_numeric(values: list[str | None]) -> np.ndarray:
    present = [float(v) for v in values if v is not None]
    if not present:
        raise DataError("numeric column entirely missing; no imputation basis")
    mean = sum(present) / len(present)
    return np.array([float(v) if v is not None else mean for v in values], dtype=np.float64)


def _impute_categorical(values: list[str | None]) -> np.ndarray:
    present = [v for v in values if v is not None]
    if not present:
        raise DataError("categorical column entirely missing; no imputation basis")
    counts = Counter(present)
    top = max(counts.values())
    mode = min(v for v, c in counts.items() if c == top)
    return np.array([v if v is not None else mode for v in values], dtype=object)


def load_csv(
    path,
    label_column: int | str | None = None,
    missing_token: str = "?",
    schema_path=None,
) -> Dataset:
    """Ingest a headered CSV file into a Dataset with imputed values.

    ``label_column`` may be a column index or header name; when omitted it
    is taken from the schema sidecar if present, else the last column.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"cannot read dataset file: {path}")

    schema = None
    sidecar = Path(schema_path) if schema_path else path.with_suffix(".schema.json")
    if sidecar.is_file():
        schema = json.loads(sidecar.read_text())

    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"empty file: {path}") from None
        rows = [row for row in reader if row]

    if not rows:
        raise DataError(f"no data rows in {path}")
    n_cols = len(header)
    for i, row in enumerate(rows):
        if len(row) != n_cols:
            raise DataError(f"ragged row {i + 2} in {path}: {len(row)} fields, expected {n_cols}")

    if label_column is None and schema and "label" in schema:
        label_column = schema["label"]
    if label_column is None:
        label_column = n_cols - 1
    if isinstance(label_column, str):
        if label_column not in header:
            raise DataError(f"label column {label_column!r} not in header")
        label_idx = header.index(label_column)
    else:
        label_idx = int(label_column)
        if not 0 <= label_idx < n_cols:
            raise DataError(f"label column index {label_idx} out of range")

    forced_categorical = set(schema.get("categorical", [])) if schema else set()

    labels = tuple(row[label_idx] for row in rows)
    feature_names, feature_kinds, columns = [], [], []
    for j in range(n_cols):
        if j == label_idx:
            continue
        raw = [row[j].strip() for row in rows]
        vals: list[str | None] = [None if v == missing_token else v for v in raw]
        present = [v for v in vals if v is not None]
        numeric = (
            header[j] not in forced_categorical
            and bool(present)
            and all(_parses_as_float(v) for v in present)
        )
        feature_names.append(header[j])
        if numeric:
            feature_kinds.append(NUMERIC)
            columns.append(_impute_numeric(vals))
        else:
            feature_kinds.append(CATEGORICAL)
            columns.append(_impute_categorical(vals))

    return Dataset(
        name=path.stem,
        feature_names=tuple(feature_names),
        feature_kinds=tuple(feature_kinds),
        columns=tuple(columns),
        labels=labels,
    )


def _partition_difference(sizes: dict[str, int], side: frozenset) -> int:
    pos = sum(sizes[c] for c in side)
    return abs(2 * pos - sum(sizes.values()))


def binarize(d: Dataset, exhaustive_limit: int = 12) -> BinaryDataset:
    """Reduce a multiclass dataset to two meta-classes of near-equal size.

    Up to ``exhaustive_limit`` classes the optimal partition is found by
    exhaustive search; above it a greedy largest-class-first rule is used.
    The meta-class containing the lexicographically smallest class maps to
    +1; among equally balanced partitions the one whose +1 side has fewer
    classes wins, then lexicographic order of the class tuple.
    """
    classes = d.classes
    if len(classes) < 2:
        raise DataError("cannot binarize a single-class dataset")
    sizes = Counter(d.labels)

    if len(classes) == 2:
        return BinaryDataset(d, {classes[0]: +1, classes[1]: -1})

    anchor, rest = classes[0], classes[1:]
    if len(classes) <= exhaustive_limit:
        best = None
        # Every nontrivial 2-partition, canonicalized as the side holding the anchor.
        for r in range(0, len(rest)):
            for combo in itertools.combinations(rest, r):
                side = frozenset((anchor,) + combo)
                diff = _partition_difference(sizes, side)
                key = (diff, len(side), tuple(sorted(side)))
                if best is None or key < best[0]:
                    best = (key, side)
        pos_side = best[1]
    else:
        # Greedy: deal classes largest-first onto the currently lighter side.
        ordered = sorted(classes, key=lambda c: (-sizes[c], c))
        side_a, side_b = set(), set()
        tot_a = tot_b = 0
        for c in ordered:
            if tot_a <= tot_b:
                side_a.add(c)
                tot_a += sizes[c]
            else:
                side_b.add(c)
                tot_b += sizes[c]
        pos_side = side_a if anchor in side_a else side_b

    label_map = {c: (+1 if c in pos_side else -1) for c in classes}
    return BinaryDataset(d, label_map)


def cv_splits(d: BinaryDataset, trials: int, folds: int, seed: int) -> SplitPlan:
    """Seeded round-robin fold assignment, independently permuted per trial."""
    m = d.m
    if trials < 1:
        raise DataError("trials must be >= 1")
    if folds < 2:
        raise DataError("folds must be >= 2")
    if folds > m:
        raise DataError(f"folds ({folds}) exceed sample size ({m})")

    assignments = np.empty((trials, m), dtype=np.int64)
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        perm = rng.permutation(m)
        for pos, inst in enumerate(perm):
            assignments[trial, inst] = pos % folds
    return SplitPlan(trials=trials, folds=folds, seed=seed, assignments=assignments)
