"""Command line interface: ``kgc <command> [options]``.

Exit codes: 0 success, 2 usage or validation error, 1 internal error.  Errors
are also written to stderr as one JSON object::

    {"error": {"type": "...", "message": "...", "command": "..."}}

Every command writes a manifest (flags, seed, input and output digests).
Directory outputs get ``manifest.json``; single-file outputs get
``<stem>.manifest.json`` beside them.
"""
from __future__ import annotations

import argparse
import configparser
import glob
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from . import connectome as cn
from . import io
from . import mlpipe as ml
from . import netmetrics as nm
from . import pipeline as pl
from . import simgen
from .featmap import FeatureMapSpec
from .gc_engine import GCMatrix, gc_matrix, select_global_lag
from .tsio import load_csv, standardize

logger = logging.getLogger("kgc")

VALIDATION_ERRORS = (ValueError, FileNotFoundError, IsADirectoryError, KeyError,
                     configparser.Error, json.JSONDecodeError)


class UsageError(ValueError):
    pass


class BatchError(RuntimeError):
    """Some inputs of a batch failed; the rest were written."""

    def __init__(self, failures: list[dict]):
        super().__init__(f"{len(failures)} input(s) failed")
        self.failures = failures


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- helpers

def split_methods(text: str) -> list[str]:
    """Split ``lin,mp:r=2,rsp:r=2,eta=1,sigma=1`` into one string per method."""
    return pl._split_specs(text)


def parse_methods(text: str) -> list[FeatureMapSpec]:
    out = []
    for tok in split_methods(text):
        out.append(FeatureMapSpec.parse(tok))
    if not out:
        raise UsageError("no methods given")
    return out


def parse_lag(text: str):
    if text.lower() == "bic":
        return "bic"
    try:
        p = int(text)
    except ValueError:
        raise UsageError(f"lag must be a positive integer or 'bic', got {text!r}") from None
    if p < 1:
        raise UsageError(f"lag must be >= 1, got {p}")
    return p


def expand_inputs(items: Sequence[str], suffix: str = ".csv") -> list[Path]:
    """Files as given; directories contribute their ``*suffix`` files, sorted."""
    out: list[Path] = []
    for item in items:
        p = Path(item)
        if p.is_dir():
            out.extend(sorted(p.glob(f"*{suffix}")))
        elif any(ch in item for ch in "*?["):
            out.extend(Path(f) for f in sorted(glob.glob(item)))
        else:
            out.append(p)
    if not out:
        raise UsageError("no input files")
    missing = [str(p) for p in out if not p.exists()]
    if missing:
        raise FileNotFoundError(f"input not found: {', '.join(missing)}")
    return out


def _flags(args) -> dict:
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items())
            if k not in ("func",)}


def _subject_stem(path: Path) -> str:
    name = path.name
    for suffix in (".gc.csv", ".gc.json", ".fc.csv", ".csv", ".json"):
        if name.endswith(suffix):
            return name[: -len(suffix)]
    return path.stem


def _load_matrix(path: Path) -> np.ndarray:
    return io.read_matrix(path)


def _file_manifest(args, command: str, out_file: Path, outputs: list[Path],
                   inputs: Sequence[Path] = (), seed: Optional[int] = None) -> Path:
    m = io.RunManifest(command, _flags(args), seed)
    m.add_inputs(inputs)
    m.add_outputs(outputs, out_file.parent)
    return m.write(out_file.parent, out_file.name.split(".")[0] + ".manifest.json")


# ---------------------------------------------------------------- simulate

def cmd_simulate(args) -> int:
    methods = parse_methods(args.methods)
    lag = parse_lag(args.lag)
    if args.runs < 1 or args.length < 10:
        raise UsageError("need --runs >= 1 and --length >= 10")
    out = Path(args.out)
    order_scores = {}
    if args.select_order:
        chosen = []
        for spec in methods:
            if spec.kind == "LIN":
                chosen.append(spec)
                continue
            best, scores = simgen.select_order(args.model, spec, seed=args.order_seed,
                                               runs=args.order_runs, M=args.length,
                                               standardize_data=args.standardize,
                                               jobs=args.jobs)
            order_scores[str(spec)] = {"chosen": str(best), "scores": scores}
            chosen.append(best)
        methods = chosen
    report, series = simgen.run_benchmark(
        args.model, args.length, args.runs, methods, p=lag, seed=args.seed,
        standardize_data=args.standardize, p_max=args.p_max, ridge=args.ridge,
        keep_series=args.series_dir is not None, jobs=args.jobs)

    written = []
    doc = {
        "model": report.model, "M": report.M, "runs": report.runs, "seed": report.seed,
        "lag": report.lag, "standardized": report.standardized,
        "run_seeds": report.run_seeds, "seeds_used": report.seeds_used,
        "resamples": report.resamples,
        "order_selection": order_scores,
        "methods": [vars(m) for m in report.methods],
        "manifest": io.MANIFEST_NAME,
    }
    written.append(io.write_json(out / "benchmark.json", doc))
    written.append(io.write_rows(
        out / "benchmark.csv",
        [(m.spec, m.true_edge_mean, m.true_edge_std, m.non_edge_mean, m.non_edge_std,
          m.detection_rate) for m in report.methods],
        header=["method", "true_edge_mean", "true_edge_std", "non_edge_mean",
                "non_edge_std", "detection_rate"]))
    if series is not None:
        sdir = Path(args.series_dir)
        if not sdir.is_absolute():
            sdir = out / sdir
        for k, sim in enumerate(series):
            written.append(io.write_rows(sdir / f"run_{k:04d}.csv", sim.ts.data.tolist(),
                                         header=sim.ts.names()))
    m = io.RunManifest("simulate", _flags(args), args.seed)
    m.add_outputs(written, out)
    m.write(out)
    for ms in report.methods:
        logger.info("%s: detection %.2f, true %.4g, non-edge %.4g", ms.spec,
                    ms.detection_rate, ms.true_edge_mean, ms.non_edge_mean)
    return 0


# ---------------------------------------------------------------- gc / fc

def _gc_one(task):
    path, spec, lag, p_max, ridge, std = task
    try:
        ts = load_csv(path)
        if std:
            ts = standardize(ts)
        target_lags = None
        if lag == "bic":
            lag, target_lags = select_global_lag(ts, p_max, spec)
        m = gc_matrix(ts, int(lag), spec, ridge)
        m.target_lags = target_lags
        return m, None
    except Exception as exc:  # reported per file, batch continues
        return None, {"file": str(path), "type": type(exc).__name__, "message": str(exc)}


def _map(fn, tasks, jobs: int):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def _check_stems(paths: list[Path]) -> list[str]:
    stems = [_subject_stem(p) for p in paths]
    dup = sorted({s for s in stems if stems.count(s) > 1})
    if dup:
        raise UsageError(f"inputs share output names: {', '.join(dup)}")
    return stems


def cmd_gc(args) -> int:
    spec = FeatureMapSpec.parse(args.spec)
    lag = "bic" if args.bic else parse_lag(str(args.lag))
    paths = expand_inputs(args.inputs)
    stems = _check_stems(paths)
    out = Path(args.out)
    tasks = [(p, spec, lag, args.p_max, args.ridge, not args.no_standardize) for p in paths]
    results = _map(_gc_one, tasks, args.jobs)
    written, failures = [], []
    for path, stem, (m, err) in zip(paths, stems, results):
        if err is not None:
            failures.append(err)
            print(json.dumps({"error": {**err, "command": "gc"}}), file=sys.stderr)
            continue
        written.extend(io.write_gc(out / stem, m, {"source": path.name,
                                                   "standardized": not args.no_standardize,
                                                   "ridge": args.ridge,
                                                   "manifest": io.MANIFEST_NAME}))
    man = io.RunManifest("gc", _flags(args), None)
    man.add_inputs(paths)
    man.add_outputs(written, out)
    if failures:
        man.flags["failures"] = failures
    man.write(out)
    if failures:
        raise BatchError(failures)
    return 0


def _fc_one(task):
    path, fisher = task
    try:
        r = cn.pearson_fc(load_csv(path))
        return (cn.fisher_z(r) if fisher else r), None
    except Exception as exc:
        return None, {"file": str(path), "type": type(exc).__name__, "message": str(exc)}


def cmd_fc(args) -> int:
    paths = expand_inputs(args.inputs)
    stems = _check_stems(paths)
    out = Path(args.out)
    results = _map(_fc_one, [(p, args.fisher_z) for p in paths], args.jobs)
    written, failures = [], []
    for stem, (m, err) in zip(stems, results):
        if err is not None:
            failures.append(err)
            print(json.dumps({"error": {**err, "command": "fc"}}), file=sys.stderr)
            continue
        written.append(io.write_matrix_csv(out / f"{stem}.fc.csv", m))
    man = io.RunManifest("fc", _flags(args), None)
    man.add_inputs(paths)
    man.add_outputs(written, out)
    man.write(out)
    if failures:
        raise BatchError(failures)
    return 0


# ---------------------------------------------------------------- masks

def cmd_mask(args) -> int:
    pa = expand_inputs(args.group_a, suffix=args.suffix)
    pb = expand_inputs(args.group_b, suffix=args.suffix)
    A = [_load_matrix(p) for p in pa]
    B = [_load_matrix(p) for p in pb]
    out = Path(args.out)
    q = None if args.no_fdr else args.q
    mask = cn.group_difference_mask(A, B, args.alpha, q, symmetric=args.symmetric)
    raw_count = mask.n_selected
    if args.prune:
        if args.symmetric:
            raise UsageError("--prune applies to directed (EC) masks only")
        mask = cn.prune_bidirectional(mask)
    extra = {"symmetric": args.symmetric, "pruned": args.prune, "n_before_prune": raw_count,
             "n_a": len(A), "n_b": len(B), "manifest": out.name.split(".")[0] + ".manifest.json"}
    written = io.write_mask(out, mask, extra)
    if args.sweep:
        alphas = [float(a) for a in args.sweep.split(",")]
        rows = cn.threshold_sweep(A, B, alphas, args.symmetric)
        written.append(io.write_rows(out.with_name(out.stem + ".sweep.csv"),
                                     [(r["alpha"], r["n_selected"]) for r in rows],
                                     header=["alpha", "n_selected"]))
    if args.diff:
        written.append(io.write_matrix_csv(out.with_name(out.stem + ".diff.csv"),
                                           cn.group_mean_diff(A, B)))
    _file_manifest(args, "mask", out, written, pa + pb)
    return 0


def cmd_fuse(args) -> int:
    ec = io.read_mask(args.ec)
    fc = io.read_mask(args.fc)
    out = Path(args.out)
    fused = cn.fuse_masks(ec, fc)
    written = io.write_mask(out, fused, {"ec": str(args.ec), "fc": str(args.fc),
                                         "manifest": out.name.split(".")[0] + ".manifest.json"})
    _file_manifest(args, "fuse", out, written, [Path(args.ec), Path(args.fc)])
    return 0


# ---------------------------------------------------------------- features

def cmd_assemble(args) -> int:
    mode = args.mode.upper()
    ec_paths = expand_inputs(args.ec, ".gc.csv") if args.ec else []
    fc_paths = expand_inputs(args.fc, ".fc.csv") if args.fc else []
    if "EC" in mode.split("+") and not ec_paths:
        raise UsageError(f"mode {mode} needs --ec matrices")
    if "FC" in mode.split("+") and not fc_paths:
        raise UsageError(f"mode {mode} needs --fc matrices")
    labels = io.read_labels(args.labels)
    n = len(ec_paths or fc_paths)
    if ec_paths and fc_paths and len(ec_paths) != len(fc_paths):
        raise UsageError(f"{len(ec_paths)} EC vs {len(fc_paths)} FC matrices")
    if labels.size != n:
        raise UsageError(f"{labels.size} labels for {n} subjects")
    ecs = [_load_matrix(p) for p in ec_paths]
    fcs = [_load_matrix(p) for p in fc_paths]
    d = (ecs or fcs)[0].shape[0]
    zeros = np.zeros((d, d))
    subjects = [(ecs[k] if ecs else zeros, fcs[k] if fcs else zeros, int(labels[k]))
                for k in range(n)]
    mask_ec = io.read_mask(args.mask_ec) if args.mask_ec else None
    mask_fc = io.read_mask(args.mask_fc) if args.mask_fc else None
    table = cn.assemble_features(subjects, mask_ec, mask_fc, mode, args.fc_full)
    out = Path(args.out)
    written = io.write_features(out, table)
    inputs = ec_paths + fc_paths + [Path(args.labels)]
    inputs += [Path(p) for p in (args.mask_ec, args.mask_fc) if p]
    _file_manifest(args, "assemble", out, written, inputs)
    return 0


def _features(args):
    X = io.read_features(args.features)
    fpath = Path(args.features)
    lpath = Path(args.labels) if args.labels else fpath.with_name(fpath.stem + ".labels.csv")
    y = io.read_labels(lpath)
    if y.size != X.shape[0]:
        raise UsageError(f"{X.shape[0]} feature rows but {y.size} labels")
    return X, y, [fpath, lpath]


def cmd_classify(args) -> int:
    X, y, inputs = _features(args)
    rep = ml.cross_validate(X, y, args.folds, args.repeats, args.C, args.seed)
    out = Path(args.out)
    written = [io.write_json(out, {**rep.to_dict(), "n_features": X.shape[1],
                                   "n_subjects": X.shape[0],
                                   "manifest": out.name.split(".")[0] + ".manifest.json"})]
    _file_manifest(args, "classify", out, written, inputs, args.seed)
    logger.info("accuracy %.4f +- %.4f", rep.mean_accuracy, rep.std_accuracy)
    return 0


def cmd_ablate(args) -> int:
    X, y, inputs = _features(args)
    fpath = Path(args.features)
    ipath = Path(args.index) if args.index else fpath.with_name(fpath.stem + ".index.json")
    index = io.read_index(ipath)
    if len(index) != X.shape[1]:
        raise UsageError(f"index lists {len(index)} columns, features have {X.shape[1]}")
    mask = io.read_mask(args.mask)
    table = cn.SubjectFeatureTable(X, y, index)
    if mask.d <= max(max(s, t) for s, t, _ in index):
        raise UsageError("mask is smaller than the feature index")
    cols = table.columns(args.kind.upper(), mask.mask)
    if args.rank:
        score = np.abs(io.read_matrix(args.rank))
        cols.sort(key=lambda c: (-score[index[c][0], index[c][1]], c))
        inputs.append(Path(args.rank))
    if not cols:
        raise UsageError("mask selects no feature columns")
    curve = ml.ablation(X, y, cols, args.step, args.folds, args.repeats, args.C, args.seed,
                        args.draws)
    out = Path(args.out)
    written = [io.write_rows(out, curve.rows(), header=["removal_fraction", "removed",
                                                        "mask_accuracy", "random_accuracy"])]
    _file_manifest(args, "ablate", out, written, inputs + [ipath, Path(args.mask)], args.seed)
    return 0


# ---------------------------------------------------------------- grid / pipeline

def cmd_grid(args) -> int:
    cfg = pl.load_config(args.config)
    out = Path(args.out)
    subjects = pl.load_subjects(cfg, out)
    result, _ = pl.run_grid(cfg, subjects, args.jobs)
    written = [io.write_json(out / "grid.json", {**result.to_dict(),
                                                 "manifest": io.MANIFEST_NAME})]
    if cfg["run"]["source"] == "synthetic":
        written += [s.source for s in subjects]
    man = io.RunManifest("grid", {**_flags(args),
                                  "config": {s: dict(cfg[s]) for s in cfg.sections()}},
                         int(cfg["cv"]["seed"]))
    man.add_inputs([args.config])
    if cfg["run"]["source"] == "data":
        man.add_inputs([s.source for s in subjects])
    man.add_outputs(written, out)
    man.write(out)
    logger.info("best %s: %.4f", result.best_spec, result.best_report.mean_accuracy)
    return 0


def cmd_pipeline(args) -> int:
    summary = pl.run_pipeline(args.config, args.out, args.jobs)
    logger.info("pipeline done: %s", json.dumps(summary))
    return 0


# ---------------------------------------------------------------- metrics

def cmd_metrics(args) -> int:
    path = Path(args.input)
    W = io.read_matrix(path)
    np.fill_diagonal(W, 0.0)
    g = nm.WeightedDigraph(W)
    eglob = nm.global_efficiency(g)
    eloc, eloc_mean = nm.local_efficiency(g)
    inputs = [path]
    if args.mask:
        adj = io.read_mask(args.mask).mask
        inputs.append(Path(args.mask))
    elif args.binarize_threshold is not None:
        adj = (W > args.binarize_threshold).astype(int)
    else:
        adj = (W > 0).astype(int)
    deg = nm.node_degrees(adj)
    out = Path(args.out)
    doc = {"E_glob": eglob, "E_loc": eloc, "E_loc_mean": eloc_mean, "degrees": deg,
           "hubs": [{"node": v, "degree": k} for v, k in nm.hub_report(deg)],
           "binarize_threshold": args.binarize_threshold,
           "manifest": out.name.split(".")[0] + ".manifest.json"}
    written = [io.write_json(out, doc)]
    _file_manifest(args, "metrics", out, written, inputs)
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="kgc", description="Kernel Granger causality and connectivity tools.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def jobs(p):
        p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")

    p = sub.add_parser("simulate", help="synthetic causality benchmark")
    p.add_argument("--model", choices=["linear", "nonlinear"], default="linear")
    p.add_argument("--runs", type=int, default=50)
    p.add_argument("--length", type=int, default=1000, help="samples per run after burn-in")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--methods", default="lin,mp:r=2,rp:r=2,rspf")
    p.add_argument("--lag", default="1", help="model order, or 'bic'")
    p.add_argument("--p-max", type=int, default=5)
    p.add_argument("--ridge", type=float, default=0.0)
    p.add_argument("--standardize", action="store_true", help="z-score each run first")
    p.add_argument("--select-order", action="store_true",
                   help="choose each kernel's order by mean accumulated GCI")
    p.add_argument("--order-seed", type=int, default=10_000)
    p.add_argument("--order-runs", type=int, default=10)
    p.add_argument("--series-dir", help="also write each run's series here")
    p.add_argument("--out", default=".", help="output directory")
    jobs(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gc", help="causality matrix per subject CSV")
    p.add_argument("inputs", nargs="+", help="CSV files or directories")
    p.add_argument("--spec", default="lin")
    p.add_argument("--lag", default="1")
    p.add_argument("--bic", action="store_true", help="choose the lag by BIC")
    p.add_argument("--p-max", type=int, default=5)
    p.add_argument("--ridge", type=float, default=0.0)
    p.add_argument("--no-standardize", action="store_true")
    p.add_argument("--out", default=".", help="output directory")
    jobs(p)
    p.set_defaults(func=cmd_gc)

    p = sub.add_parser("fc", help="Pearson correlation matrix per subject CSV")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--fisher-z", action="store_true")
    p.add_argument("--out", default=".")
    jobs(p)
    p.set_defaults(func=cmd_fc)

    p = sub.add_parser("mask", help="group-difference significance mask")
    p.add_argument("--group-a", nargs="+", required=True, help="matrices of group A")
    p.add_argument("--group-b", nargs="+", required=True, help="matrices of group B")
    p.add_argument("--suffix", default=".csv", help="file suffix when a directory is given")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--q", type=float, default=0.05)
    p.add_argument("--no-fdr", action="store_true", help="raw alpha threshold only")
    p.add_argument("--symmetric", action="store_true", help="undirected (FC) matrices")
    p.add_argument("--prune", action="store_true", help="drop bidirectional EC pairs")
    p.add_argument("--sweep", help="comma list of raw thresholds to count")
    p.add_argument("--diff", action="store_true", help="also write the group mean difference")
    p.add_argument("--out", required=True, help="mask CSV path")
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("fuse", help="EC mask AND FC mask")
    p.add_argument("--ec", required=True)
    p.add_argument("--fc", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("assemble", help="subject feature table")
    p.add_argument("--ec", nargs="*", default=[])
    p.add_argument("--fc", nargs="*", default=[])
    p.add_argument("--labels", required=True, help="CSV with one 0/1 label per subject")
    p.add_argument("--mask-ec")
    p.add_argument("--mask-fc")
    p.add_argument("--mode", default="EC+FC", choices=["EC", "FC", "EC+FC", "ec", "fc", "ec+fc"])
    p.add_argument("--fc-full", action="store_true")
    p.add_argument("--out", required=True, help="features CSV path")
    p.set_defaults(func=cmd_assemble)

    def cv(p):
        p.add_argument("--folds", type=int, default=10)
        p.add_argument("--repeats", type=int, default=100)
        p.add_argument("--C", type=float, default=1.0)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("classify", help="repeated stratified CV of a linear SVM")
    p.add_argument("--features", required=True)
    p.add_argument("--labels", help="default: <features stem>.labels.csv")
    cv(p)
    p.add_argument("--out", required=True, help="report JSON path")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("grid", help="feature-map grid search from a config file")
    p.add_argument("config")
    p.add_argument("--out", default=".")
    jobs(p)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("ablate", help="mask-ranked vs random feature removal")
    p.add_argument("--features", required=True)
    p.add_argument("--labels")
    p.add_argument("--index", help="default: <features stem>.index.json")
    p.add_argument("--mask", required=True)
    p.add_argument("--kind", default="EC", choices=["EC", "FC", "ec", "fc"])
    p.add_argument("--rank", help="matrix whose |value| orders removal (largest first)")
    p.add_argument("--step", type=float, default=0.1)
    p.add_argument("--draws", type=int, default=10)
    cv(p)
    p.set_defaults(repeats=10)
    p.add_argument("--out", required=True, help="curve CSV path")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("metrics", help="efficiency, degrees and hubs of a GC matrix")
    p.add_argument("input", help="GC matrix CSV or JSON")
    p.add_argument("--binarize-threshold", type=float,
                   help="edges with weight above this count for degrees (default > 0)")
    p.add_argument("--mask", help="binary mask used for degrees instead")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("pipeline", help="end-to-end run from a config file")
    p.add_argument("config")
    p.add_argument("--out", default="run")
    jobs(p)
    p.set_defaults(func=cmd_pipeline)
    return ap


def _envelope(kind: str, exc: BaseException, command: Optional[str], **extra) -> str:
    return json.dumps({"error": {"type": kind, "message": str(exc), "command": command,
                                 **extra}})


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    command = None
    try:
        args = parser.parse_args(argv)
        command = args.command
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be >= 1")
        return args.func(args)
    except BatchError as exc:
        print(_envelope("BatchError", exc, command, failures=exc.failures), file=sys.stderr)
        return 2 if all(f["type"] in _validation_names() for f in exc.failures) else 1
    except pl.StageError as exc:
        cause = exc.__cause__
        code = 2 if isinstance(cause, VALIDATION_ERRORS) else 1
        print(_envelope(type(cause).__name__, exc, command, stage=exc.stage), file=sys.stderr)
        return code
    except VALIDATION_ERRORS as exc:
        print(_envelope(type(exc).__name__, exc, command), file=sys.stderr)
        return 2
    except Exception as exc:
        logger.debug("internal error", exc_info=True)
        print(_envelope(type(exc).__name__, exc, command), file=sys.stderr)
        return 1


def _validation_names() -> set[str]:
    from .connectome import ConnectomeError
    from .featmap import FeatureMapError
    from .gc_engine import GCError
    from .mlpipe import ClassificationError
    from .netmetrics import GraphError
    from .tsio import TimeSeriesError
    return {c.__name__ for c in (ValueError, FileNotFoundError, TimeSeriesError, GCError,
                                 FeatureMapError, ConnectomeError, ClassificationError,
                                 GraphError, UsageError)}


if __name__ == "__main__":
    sys.exit(main())
