"""Cross-validated experiments, neighbor-quality metrics and result export.

Seeds
-----
In the ``simulation`` modality the measurement seed of a test instance is
``derive_seed(root_seed, run, fold, instance, k)`` (see
:mod:`eqknn.seeding`), where ``instance`` is the row index in the full
dataset.  The seed does not depend on the distance estimator, so ``avg``
and ``diff`` are always scored on the same sampled counts, while
different ``k`` values get independent streams.
"""
from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .circuit import DEFAULT_PSEUDOCOUNTS, DEFAULT_SHOTS
from .dataset import Dataset, FoldSplit, stratified_folds
from .encode import EncodingKind
from .estimate import DistanceEstimateKind
from .knn import MODALITIES, classical_distances, majority_vote, quantum_distances, run_circuit, \
    select_neighbors
from .preprocess import Normalizer
from .seeding import derive_seed

DEFAULT_FOLDS = 5
DEFAULT_RUNS = 5
K_GRID = (3, 5, 7, 9)
SHOTS_GRID = (512, 1024, 2048, 4096, 8192)


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    modality: str
    k: int
    fold_seed: int
    encoding: str | None = "extension"
    estimate: str | None = "avg"
    folds: int = DEFAULT_FOLDS
    shots: int | None = None
    pseudocounts: int | None = None
    runs: int | None = None
    root_seed: int | None = None

    def __post_init__(self):
        if self.modality not in MODALITIES:
            raise ConfigError(f"modality must be one of {MODALITIES}, got {self.modality!r}")
        if self.k < 1:
            raise ConfigError(f"k must be positive, got {self.k}")
        if self.folds < 2:
            raise ConfigError(f"folds must be >= 2, got {self.folds}")
        sim_fields = {"shots": self.shots, "pseudocounts": self.pseudocounts,
                      "runs": self.runs, "root_seed": self.root_seed}
        if self.modality == "simulation":
            defaults = {"shots": DEFAULT_SHOTS, "pseudocounts": DEFAULT_PSEUDOCOUNTS, "runs": DEFAULT_RUNS}
            for name, value in defaults.items():
                if sim_fields[name] is None:
                    object.__setattr__(self, name, value)
            if self.root_seed is None:
                raise ConfigError("simulation requires an explicit root_seed")
            if self.shots < 1 or self.runs < 1 or self.pseudocounts < 0:
                raise ConfigError("shots and runs must be positive, pseudocounts non-negative")
        else:
            given = [name for name, value in sim_fields.items() if value is not None]
            if given:
                raise ConfigError(f"{', '.join(given)} only apply to the simulation modality")
        if self.modality == "classical":
            object.__setattr__(self, "encoding", None)
            object.__setattr__(self, "estimate", None)
        else:
            try:
                object.__setattr__(self, "encoding", EncodingKind(self.encoding).value)
                object.__setattr__(self, "estimate", DistanceEstimateKind(self.estimate).value)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None

    @property
    def n_runs(self) -> int:
        return self.runs if self.modality == "simulation" else 1


@dataclass(frozen=True)
class InstanceRecord:
    index: int
    true_label: object
    predicted_label: object
    k_set: tuple
    correct_k_set: tuple
    ji: float
    aj: float
    clamp_events: int = 0


@dataclass(frozen=True)
class FoldResult:
    fold_id: int
    run_id: int
    accuracy: float
    mean_jaccard: float
    mean_avg_jaccard: float
    records: tuple = field(repr=False)
    config: ExperimentConfig | None = None
    dataset: str = ""


def jaccard_index(s_correct: Iterable, s_found: Iterable) -> float:
    a, b = set(s_correct), set(s_found)
    union = a | b
    if not union:
        raise ValueError("Jaccard index is undefined for two empty sets")
    return len(a & b) / len(union)


def average_jaccard(ranked_correct: Sequence, ranked_found: Sequence) -> float:
    """Mean Jaccard index over the prefixes of length 1..k of both rankings."""
    if len(ranked_correct) != len(ranked_found):
        raise ValueError("rankings must have the same length")
    k = len(ranked_correct)
    if k == 0:
        raise ValueError("rankings must be non-empty")
    return sum(jaccard_index(ranked_correct[:m], ranked_found[:m]) for m in range(1, k + 1)) / k


def _run_fold(cfg: ExperimentConfig, ds: Dataset, split: FoldSplit, fold: int, run: int,
              dump=None) -> FoldResult:
    train_idx, test_idx = split.train_indices(fold), split.test_indices(fold)
    normalizer = Normalizer().fit(ds.instances[train_idx])
    V = normalizer.transform(ds.instances[train_idx])
    W = normalizer.transform_test(ds.instances[test_idx])
    train_labels = ds.labels[train_idx]

    records, correct = [], 0
    for pos, (inst, w) in enumerate(zip(test_idx, W)):
        reference = select_neighbors(classical_distances(V, w), cfg.k)
        clamps = 0
        if cfg.modality == "classical":
            found = reference
        else:
            shots = seed = None
            if cfg.modality == "simulation":
                shots = cfg.shots
                seed = derive_seed(cfg.root_seed, run, fold, int(inst), cfg.k)
            trace = run_circuit(V, w, cfg.encoding, shots, cfg.pseudocounts or 0, seed)
            table = quantum_distances(V, w, cfg.encoding, [cfg.estimate], trace=trace)[cfg.estimate]
            clamps = table.clamp_events
            found = select_neighbors(table, cfg.k)
            if dump is not None:
                dump(cfg, run, fold, int(inst), pos, trace, table)
        predicted = majority_vote(found.k_set, train_labels)
        correct += predicted == ds.labels[inst]
        ranked_c = tuple(int(train_idx[i]) for i in reference.k_set)
        ranked_f = tuple(int(train_idx[i]) for i in found.k_set)
        records.append(InstanceRecord(int(inst), ds.labels[inst], predicted, ranked_f, ranked_c,
                                      jaccard_index(ranked_c, ranked_f),
                                      average_jaccard(ranked_c, ranked_f), clamps))

    n = len(records)
    return FoldResult(fold, run, correct / n,
                      float(np.mean([r.ji for r in records])),
                      float(np.mean([r.aj for r in records])),
                      tuple(records), cfg, ds.name)


def run_experiment(cfg: ExperimentConfig, ds: Dataset, threads: int = 1, dump=None) -> list[FoldResult]:
    """Run every (run, fold) work unit of ``cfg`` on ``ds``.

    The normalizer is refit on each fold's training split.  Neighbor indices
    in the records refer to rows of ``ds``.  Results are ordered by
    ``(run, fold)`` whatever the degree of parallelism.
    """
    split = stratified_folds(ds, cfg.folds, cfg.fold_seed)
    smallest_train = min(split.train_indices(f).size for f in range(cfg.folds))
    if cfg.k > smallest_train:
        raise ConfigError(f"k={cfg.k} exceeds the smallest fold training set ({smallest_train})")
    units = [(run, fold) for run in range(cfg.n_runs) for fold in range(cfg.folds)]
    if threads > 1 and dump is None:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda u: _run_fold(cfg, ds, split, u[1], u[0]), units))
    else:
        results = [_run_fold(cfg, ds, split, fold, run, dump) for run, fold in units]
    return sorted(results, key=lambda r: (r.run_id, r.fold_id))


def mean_over_runs(results: Sequence[FoldResult]) -> dict[int, tuple[float, float, float]]:
    """Per-fold (accuracy, mean JI, mean AJ) averaged across runs."""
    out = {}
    for fold in sorted({r.fold_id for r in results}):
        rows = [r for r in results if r.fold_id == fold]
        out[fold] = (float(np.mean([r.accuracy for r in rows])),
                     float(np.mean([r.mean_jaccard for r in rows])),
                     float(np.mean([r.mean_avg_jaccard for r in rows])))
    return out


PER_FOLD_COLUMNS = ["dataset", "modality", "encoding", "estimate", "k", "folds", "shots", "pseudocounts",
                    "root_seed", "fold_seed", "run", "fold", "accuracy", "mean_ji", "mean_aj"]
PER_INSTANCE_COLUMNS = PER_FOLD_COLUMNS[:12] + ["instance", "true_label", "predicted_label", "k_set",
                                                "correct_k_set", "ji", "aj", "clamp_events"]


def _blank(value):
    return "" if value is None else value


def _config_cells(r: FoldResult) -> list:
    c = r.config
    return [r.dataset, c.modality, _blank(c.encoding), _blank(c.estimate), c.k, c.folds, _blank(c.shots),
            _blank(c.pseudocounts), _blank(c.root_seed), c.fold_seed, r.run_id, r.fold_id]


def _sort_key(r: FoldResult):
    c = r.config
    return (r.dataset, c.modality, c.encoding or "", c.estimate or "", c.k, c.shots or 0, r.run_id, r.fold_id)


def export_results(results: Sequence[FoldResult], directory) -> tuple[str, str]:
    """Write ``per_fold.csv`` and ``per_instance.csv`` into ``directory``.

    Rows are sorted by configuration, run and fold, so identical results
    always produce identical bytes.
    """
    os.makedirs(directory, exist_ok=True)
    fold_path = os.path.join(directory, "per_fold.csv")
    inst_path = os.path.join(directory, "per_instance.csv")
    ordered = sorted(results, key=_sort_key)
    with open(fold_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PER_FOLD_COLUMNS)
        for r in ordered:
            writer.writerow(_config_cells(r) + [repr(r.accuracy), repr(r.mean_jaccard), repr(r.mean_avg_jaccard)])
    with open(inst_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PER_INSTANCE_COLUMNS)
        for r in ordered:
            head = _config_cells(r)
            for rec in r.records:
                writer.writerow(head + [rec.index, rec.true_label, rec.predicted_label,
                                        ";".join(map(str, rec.k_set)), ";".join(map(str, rec.correct_k_set)),
                                        repr(rec.ji), repr(rec.aj), rec.clamp_events])
    return fold_path, inst_path


def config_grid(base: ExperimentConfig, **axes) -> list[ExperimentConfig]:
    """Cartesian product of ``base`` over the given field value lists."""
    configs = [base]
    for name, values in axes.items():
        configs = [replace(c, **{name: v}) for c in configs for v in values]
    return configs
