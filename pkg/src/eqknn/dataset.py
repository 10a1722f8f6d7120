"""Labeled datasets, CSV loading and seeded stratified k-fold splits.

Fold shuffling uses numpy's ``PCG64`` bit generator seeded with the caller's
64-bit integer, so assignments reproduce across platforms.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .seeding import make_rng


class DatasetError(ValueError):
    """Raised for unreadable, malformed or inconsistent datasets."""


@dataclass(frozen=True)
class Dataset:
    instances: np.ndarray
    labels: np.ndarray
    name: str = "dataset"

    def __post_init__(self):
        X = np.asarray(self.instances, dtype=float)
        y = np.asarray(self.labels)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise DatasetError(f"instances must be a non-empty (N, d) array, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise DatasetError(f"expected {X.shape[0]} labels, got {y.shape}")
        if not np.all(np.isfinite(X)):
            raise DatasetError("instances contain non-finite values")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "instances", X)
        object.__setattr__(self, "labels", y)

    @property
    def n_instances(self) -> int:
        return self.instances.shape[0]

    @property
    def n_features(self) -> int:
        return self.instances.shape[1]

    def subset(self, indices) -> Dataset:
        indices = np.asarray(indices, dtype=int)
        return Dataset(self.instances[indices], self.labels[indices], self.name)


def load_csv(path, label_column: int | str = -1, header: bool = True, name: str | None = None) -> Dataset:
    """Read a comma-separated file into a :class:`Dataset`.

    ``label_column`` is a 0-based position (negative counts from the end) or,
    when ``header`` is true, a column name.  Row order is preserved.  Parse
    errors report 1-based file line and column numbers.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh)]
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc

    first_line = 1
    names = None
    if header:
        if not rows:
            raise DatasetError(f"{path}: empty file")
        names = [c.strip() for c in rows[0]]
        rows = rows[1:]
        first_line = 2
    # skip blank trailing lines but keep line numbering for the rest
    numbered = [(first_line + i, r) for i, r in enumerate(rows) if any(c.strip() for c in r)]
    if not numbered:
        raise DatasetError(f"{path}: no data rows")

    width = len(numbered[0][1]) if names is None else len(names)
    if width < 2:
        raise DatasetError(f"{path}: need at least one feature column and a label column")
    if isinstance(label_column, str):
        if names is None or label_column not in names:
            raise DatasetError(f"{path}: unknown label column {label_column!r}")
        label_pos = names.index(label_column)
    else:
        if not -width <= label_column < width:
            raise DatasetError(f"{path}: label column {label_column} out of range for {width} columns")
        label_pos = label_column % width

    features, labels = [], []
    for line, row in numbered:
        if len(row) != width:
            raise DatasetError(f"{path}: line {line} has {len(row)} columns, expected {width}")
        values = []
        for col, cell in enumerate(row):
            if col == label_pos:
                continue
            try:
                value = float(cell)
            except ValueError:
                raise DatasetError(
                    f"{path}: line {line}, column {col + 1}: cannot parse {cell!r} as a number"
                ) from None
            if not math.isfinite(value):
                raise DatasetError(f"{path}: line {line}, column {col + 1}: non-finite value {cell!r}")
            values.append(value)
        features.append(values)
        labels.append(row[label_pos].strip())

    return Dataset(np.array(features), np.array(labels), name or path.stem)


@dataclass(frozen=True)
class FoldSplit:
    fold_assignments: np.ndarray
    folds: int
    seed: int

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_assignments == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_assignments != fold)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["index", "fold"])
            for i, f in enumerate(self.fold_assignments):
                writer.writerow([i, int(f)])


def _class_order(labels: np.ndarray) -> list:
    # labels are opaque tokens: order classes by their string form for determinism
    return sorted(set(labels.tolist()), key=str)


def stratified_folds(ds: Dataset, folds: int, seed: int) -> FoldSplit:
    """Assign every instance to one of ``folds`` folds, stratified by label.

    Each class is shuffled with the seeded generator and dealt round-robin;
    the deal pointer carries over from one class to the next so that fold
    sizes also differ by at most one.
    """
    if folds < 2:
        raise DatasetError(f"folds must be >= 2, got {folds}")
    if folds > ds.n_instances:
        raise DatasetError(f"folds ({folds}) exceeds the number of instances ({ds.n_instances})")

    rng = make_rng(seed)
    assignments = np.empty(ds.n_instances, dtype=int)
    pointer = 0
    for cls in _class_order(ds.labels):
        members = np.flatnonzero(ds.labels == cls)
        members = members[rng.permutation(members.size)]
        assignments[members] = (pointer + np.arange(members.size)) % folds
        pointer = (pointer + members.size) % folds
    assignments.setflags(write=False)
    return FoldSplit(assignments, folds, int(seed))


IRIS_PAIRS = {
    "01_iris_setosa_versicolor": ("setosa", "versicolor"),
    "01_iris_setosa_virginica": ("setosa", "virginica"),
    "01_iris_versicolor_virginica": ("versicolor", "virginica"),
}


def iris_pair(name: str) -> Dataset:
    """Two-class iris subset (100 rows, 4 features) in the original row order."""
    from sklearn.datasets import load_iris

    if name not in IRIS_PAIRS:
        raise DatasetError(f"unknown iris subset {name!r}; choose from {sorted(IRIS_PAIRS)}")
    iris = load_iris()
    species = np.asarray(iris.target_names)[iris.target]
    keep = np.isin(species, IRIS_PAIRS[name])
    return Dataset(iris.data[keep], species[keep], name)


def bundled_dataset_path(name: str) -> Path:
    return Path(__file__).parent / "data" / f"{name}.csv"


def write_csv(ds: Dataset, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"f{i}" for i in range(ds.n_features)] + ["label"])
        for row, label in zip(ds.instances, ds.labels):
            writer.writerow([repr(float(v)) for v in row] + [label])
