"""Command-line interface.

``eqknn run`` executes cross-validated experiments and writes
``per_fold.csv``, ``per_instance.csv`` and ``config.json`` into the output
directory; ``eqknn datasets`` writes the bundled iris subsets as CSV.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""
from __future__ import annotations

import argparse
import configparser
import json
import os
import shutil
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .dataset import IRIS_PAIRS, DatasetError, bundled_dataset_path, iris_pair, load_csv, write_csv
from .encode import EncodingError
from .harness import (K_GRID, ConfigError, ExperimentConfig, export_results, mean_over_runs,
                      run_experiment)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _str_list(text: str) -> list[str]:
    return [v.strip() for v in str(text).split(",") if v.strip()]


@dataclass
class CliConfig:
    dataset: str
    fold_seed: int
    modality: str = "statevector"
    encodings: list = field(default_factory=lambda: ["extension"])
    estimates: list = field(default_factory=lambda: ["avg"])
    ks: list = field(default_factory=lambda: list(K_GRID))
    folds: int = 5
    shots: list | None = None
    pseudocounts: int | None = None
    runs: int | None = None
    root_seed: int | None = None
    label_column: str = "-1"
    header: bool = True
    output: str = "results"
    force: bool = False
    threads: int = 1
    dump_statevector: bool = False
    dump_joint: bool = False
    dump_distances: bool = False
    dump_limit: int = 1

    def experiments(self) -> list[ExperimentConfig]:
        out = []
        if self.modality == "classical":
            for k in self.ks:
                out.append(ExperimentConfig("classical", k, self.fold_seed, folds=self.folds))
            return out
        for enc in self.encodings:
            for est in self.estimates:
                for k in self.ks:
                    for shots in (self.shots or [None]):
                        out.append(ExperimentConfig(self.modality, k, self.fold_seed, enc, est, self.folds,
                                                    shots, self.pseudocounts, self.runs, self.root_seed))
        return out


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eqknn", description="Quantum k-NN with Euclidean distance estimation")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    run = sub.add_parser("run", help="run cross-validated experiments")
    run.add_argument("--config", help="INI file with a [run] section supplying defaults")
    run.add_argument("--dataset", help="CSV path or bundled dataset name")
    run.add_argument("--label-column", default="-1", help="label column index or name (default: last)")
    run.add_argument("--no-header", dest="header", action="store_false", default=True)
    run.add_argument("--modality", choices=["classical", "statevector", "simulation"], default="statevector")
    run.add_argument("--encoding", type=_str_list, default=None, help="extension, translation or both")
    run.add_argument("--estimate", type=_str_list, default=None, help="avg, diff or both")
    run.add_argument("--k", type=_int_list, default=None, help="neighbors, comma-separated (default 3,5,7,9)")
    run.add_argument("--folds", type=int, default=5)
    run.add_argument("--shots", type=int, default=None)
    run.add_argument("--grid-shots", type=_int_list, default=None, help="comma-separated shots grid")
    run.add_argument("--pseudocounts", type=int, default=None)
    run.add_argument("--runs", type=int, default=None)
    run.add_argument("--root-seed", type=int, default=None)
    run.add_argument("--fold-seed", type=int, default=None)
    run.add_argument("--output", default="results")
    run.add_argument("--force", action="store_true", default=False)
    run.add_argument("--threads", type=int, default=1)
    run.add_argument("--dump-statevector", action="store_true", default=False)
    run.add_argument("--dump-joint", action="store_true", default=False)
    run.add_argument("--dump-distances", action="store_true", default=False)
    run.add_argument("--dump-limit", type=int, default=1, help="test instances dumped per fold (run 0)")

    ds = sub.add_parser("datasets", help="write the bundled iris subsets as CSV")
    ds.add_argument("--out", default=".")
    parser.run_parser = run
    return parser


_BOOL_KEYS = {"header", "force", "dump_statevector", "dump_joint", "dump_distances"}


def _config_defaults(path: str) -> dict:
    cp = configparser.ConfigParser()
    if not cp.read(path, encoding="utf-8"):
        raise UsageError(f"cannot read config file {path}")
    if "run" not in cp:
        raise UsageError(f"{path}: missing [run] section")
    values = {}
    for key, raw in cp["run"].items():
        dest = key.replace("-", "_")
        values[dest] = cp["run"].getboolean(key) if dest in _BOOL_KEYS else raw
    return values


def parse_args(argv) -> CliConfig | tuple:
    parser = build_parser()
    argv = list(argv)
    if argv and argv[0] == "run" and "--config" in argv:
        pos = argv.index("--config")
        if pos + 1 >= len(argv):
            raise UsageError("--config needs a path")
        run_parser = parser.run_parser
        defaults = _config_defaults(argv[pos + 1])
        known = {a.dest for a in run_parser._actions}
        unknown = set(defaults) - known
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        run_parser.set_defaults(**defaults)
    ns = parser.parse_args(argv)
    if ns.command == "datasets":
        return ("datasets", ns.out)
    if ns.command != "run":
        raise UsageError("expected a subcommand: run or datasets")
    return _validate(ns)


def _validate(ns) -> CliConfig:
    # values coming from a config file that bypassed argparse type conversion
    for name, conv in (("encoding", _str_list), ("estimate", _str_list), ("k", _int_list),
                       ("grid_shots", _int_list)):
        value = getattr(ns, name)
        if isinstance(value, str):
            setattr(ns, name, conv(value))
    if ns.dataset is None:
        raise UsageError("--dataset is required")
    if ns.fold_seed is None:
        raise UsageError("--fold-seed is required: fold generation must be reproducible")
    sim_only = {"--shots": ns.shots, "--grid-shots": ns.grid_shots, "--pseudocounts": ns.pseudocounts,
                "--runs": ns.runs, "--root-seed": ns.root_seed}
    if ns.modality != "simulation":
        given = [flag for flag, v in sim_only.items() if v is not None]
        if given:
            raise UsageError(f"{', '.join(given)} only apply to --modality simulation")
    else:
        if ns.root_seed is None:
            raise UsageError("--root-seed is required for --modality simulation")
        if ns.shots is not None and ns.grid_shots is not None:
            raise UsageError("use either --shots or --grid-shots")
    if ns.modality == "classical" and (ns.encoding or ns.estimate):
        raise UsageError("--encoding/--estimate do not apply to --modality classical")
    ks = ns.k or list(K_GRID)
    if any(k < 1 for k in ks):
        raise UsageError("--k values must be positive")
    if ns.folds < 2:
        raise UsageError("--folds must be >= 2")
    if ns.threads < 1:
        raise UsageError("--threads must be >= 1")
    shots = ns.grid_shots or ([ns.shots] if ns.shots is not None else None)
    if shots is not None and any(s < 1 for s in shots):
        raise UsageError("shots must be positive")
    if ns.pseudocounts is not None and ns.pseudocounts < 0:
        raise UsageError("--pseudocounts must be non-negative")
    if ns.runs is not None and ns.runs < 1:
        raise UsageError("--runs must be positive")
    cfg = CliConfig(
        dataset=ns.dataset, fold_seed=ns.fold_seed, modality=ns.modality,
        encodings=ns.encoding or ["extension"], estimates=ns.estimate or ["avg"], ks=ks,
        folds=ns.folds, shots=shots, pseudocounts=ns.pseudocounts, runs=ns.runs, root_seed=ns.root_seed,
        label_column=str(ns.label_column), header=bool(ns.header), output=ns.output, force=bool(ns.force),
        threads=ns.threads, dump_statevector=ns.dump_statevector, dump_joint=ns.dump_joint,
        dump_distances=ns.dump_distances, dump_limit=ns.dump_limit,
    )
    try:
        cfg.experiments()
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    return cfg


def _resolve_dataset(cfg: CliConfig):
    path = Path(cfg.dataset)
    if not path.exists() and cfg.dataset in IRIS_PAIRS:
        path = bundled_dataset_path(cfg.dataset)
    label = cfg.label_column
    try:
        label = int(label)
    except ValueError:
        pass
    return load_csv(path, label, header=cfg.header)


def _tag(exp: ExperimentConfig) -> str:
    parts = [exp.modality]
    if exp.encoding:
        parts += [exp.encoding, exp.estimate]
    parts.append(f"k{exp.k}")
    if exp.shots:
        parts.append(f"s{exp.shots}")
    return "-".join(parts)


def _make_dumper(cfg: CliConfig, root: str):
    if not (cfg.dump_statevector or cfg.dump_joint or cfg.dump_distances):
        return None
    dump_dir = os.path.join(root, "dumps")
    os.makedirs(dump_dir, exist_ok=True)

    def dump(exp, run, fold, inst, pos, trace, table):
        if run != 0 or pos >= cfg.dump_limit:
            return
        stem = os.path.join(dump_dir, f"{_tag(exp)}-fold{fold}-inst{inst}")
        if cfg.dump_statevector:
            trace.initial.to_csv(stem + "-initial_state.csv")
            trace.final.to_csv(stem + "-final_state.csv")
        if cfg.dump_joint:
            trace.joint.to_csv(stem + "-joint.csv")
        if cfg.dump_distances:
            table.to_csv(stem + "-distances.csv")

    return dump


def execute(cfg: CliConfig) -> int:
    out = Path(cfg.output)
    if out.exists() and (not out.is_dir() or (any(out.iterdir()) and not cfg.force)):
        raise UsageError(f"output directory {out} is not empty (use --force)")
    ds = _resolve_dataset(cfg)
    experiments = cfg.experiments()
    header = {"dataset": str(cfg.dataset), "n_instances": ds.n_instances, "n_features": ds.n_features,
              **{k: v for k, v in asdict(cfg).items() if k not in ("dataset", "output", "force", "threads")}}
    print("# eqknn " + json.dumps(header, sort_keys=True))

    out.parent.mkdir(parents=True, exist_ok=True)
    tmp = tempfile.mkdtemp(prefix=f".{out.name}.", dir=out.parent)
    try:
        dumper = _make_dumper(cfg, tmp)
        results = []
        for exp in experiments:
            block = run_experiment(exp, ds, threads=cfg.threads, dump=dumper)
            results.extend(block)
            for fold, (acc, ji, aj) in mean_over_runs(block).items():
                print(f"{_tag(exp)} fold={fold} accuracy={acc:.4f} ji={ji:.4f} aj={aj:.4f}")
        export_results(results, tmp)
        with open(os.path.join(tmp, "config.json"), "w", encoding="utf-8") as fh:
            json.dump(header, fh, indent=2, sort_keys=True)
            fh.write("\n")
        if out.exists():
            shutil.rmtree(out)
        os.replace(tmp, out)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return EXIT_OK


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        parsed = parse_args(argv)
        if isinstance(parsed, tuple):
            os.makedirs(parsed[1], exist_ok=True)
            for name in IRIS_PAIRS:
                write_csv(iris_pair(name), os.path.join(parsed[1], f"{name}.csv"))
            return EXIT_OK
        return execute(parsed)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"harness: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DatasetError as exc:
        print(f"dataset: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"io: {exc}", file=sys.stderr)
        return EXIT_DATA
    except EncodingError as exc:
        print(f"encode: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
