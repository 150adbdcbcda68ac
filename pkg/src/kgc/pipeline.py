"""End-to-end EC/FC pipeline driven by an INI config file.

Stages run in order and each writes its artifacts under the output directory:

    load -> grid -> gc -> masks -> features -> classify -> ablation -> metrics

Config sections (all keys optional unless noted)::

    [data]        group_high, group_low   glob patterns of subject CSVs (labels 1/0)
    [synthetic]   used instead of [data]: subjects_per_group, coupling_high,
                  coupling_low, length, channels, drivers, targets_per_driver,
                  coupling_spread, seed
    [gc]          lag (int or "bic"), p_max, ridge, standardize
    [grid]        kind (rsp|rp|mp|lin), r, eta, sigma (comma lists) or spec
    [cv]          folds, repeats, C, seed
    [mask]        alpha, q, prune, fisher_z
    [features]    mode (EC|FC|EC+FC), fc_full
    [ablation]    enabled, step, draws, repeats
    [metrics]     alpha
"""
from __future__ import annotations

import configparser
import glob
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import connectome as cn
from . import io
from . import mlpipe as ml
from . import netmetrics as nm
from .featmap import FeatureMapSpec
from .gc_engine import GCMatrix, gc_matrix, select_global_lag
from .simgen import gen_coupled_subject
from .tsio import TimeSeriesMatrix, load_csv, standardize

logger = logging.getLogger(__name__)


class StageError(RuntimeError):
    def __init__(self, stage: str, exc: Exception):
        super().__init__(f"stage {stage!r} failed: {exc}")
        self.stage = stage


DEFAULTS = {
    "gc": {"lag": "1", "p_max": "5", "ridge": "0", "standardize": "true"},
    "grid": {"kind": "rsp", "r": "1,2,3,4,5",
             "eta": "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0",
             "sigma": "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0"},
    "cv": {"folds": "10", "repeats": "100", "C": "1.0", "seed": "0"},
    "mask": {"alpha": "0.01", "q": "0.05", "prune": "true", "fisher_z": "false"},
    "features": {"mode": "EC+FC", "fc_full": "false"},
    "ablation": {"enabled": "true", "step": "0.1", "draws": "10", "repeats": "10"},
    "metrics": {"alpha": "0.01"},
    "synthetic": {"subjects_per_group": "50", "coupling_high": "0.8", "coupling_low": "0.2",
                  "length": "100", "channels": "16", "drivers": "4",
                  "targets_per_driver": "3", "coupling_spread": "0.5", "seed": "0"},
}


def load_config(path_or_text) -> configparser.ConfigParser:
    """Parse a config file (or INI text starting with ``[``) over the defaults.

    ``[run] source`` is set to ``data`` or ``synthetic`` depending on which
    section the config supplies; ``[data]`` wins when both are present.
    """
    raw = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    raw.optionxform = str
    text = str(path_or_text)
    if text.lstrip().startswith("["):
        raw.read_string(text)
    else:
        if not Path(text).exists():
            raise FileNotFoundError(f"config file not found: {text}")
        raw.read(text, encoding="utf-8")
    if raw.has_section("data"):
        source = "data"
    elif raw.has_section("synthetic"):
        source = "synthetic"
    else:
        raise ValueError("config needs a [data] or [synthetic] section")
    unknown = set(raw.sections()) - set(DEFAULTS) - {"data", "run"}
    if unknown:
        raise ValueError(f"unknown config sections: {sorted(unknown)}")
    cfg = configparser.ConfigParser()
    cfg.optionxform = str
    cfg.read_dict(DEFAULTS)
    cfg.read_dict(raw)
    if not cfg.has_section("run"):
        cfg.add_section("run")
    cfg["run"]["source"] = source
    return cfg


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


@dataclass
class Subject:
    name: str
    ts: TimeSeriesMatrix
    label: int
    source: Optional[Path] = None


def load_subjects(cfg, out_dir: Path) -> list[Subject]:
    """Subjects in a fixed order: high group (label 1) then low group (label 0)."""
    if cfg["run"]["source"] == "data":
        subjects = []
        for key, label in (("group_high", 1), ("group_low", 0)):
            pattern = cfg.get("data", key)
            files = sorted(glob.glob(pattern))
            if not files:
                raise FileNotFoundError(f"no files match {key} = {pattern}")
            for f in files:
                subjects.append(Subject(Path(f).stem, load_csv(f), label, Path(f)))
        return subjects
    s = cfg["synthetic"]
    n = int(s["subjects_per_group"])
    seed = int(s["seed"])
    subjects = []
    sub_dir = out_dir / "subjects"
    for label, key in ((1, "coupling_high"), (0, "coupling_low")):
        for k in range(n):
            sim = gen_coupled_subject(float(s[key]), int(s["channels"]), int(s["drivers"]),
                                      int(s["targets_per_driver"]), int(s["length"]),
                                      seed=seed + 100_000 * label + k,
                                      coupling_spread=float(s["coupling_spread"]))
            name = f"{'high' if label else 'low'}_{k:03d}"
            path = io.write_matrix_csv(sub_dir / f"{name}.csv", sim.ts.data)
            subjects.append(Subject(name, sim.ts, label, path))
    return subjects


def _subject_gc(args) -> GCMatrix:
    ts, spec, lag, p_max, ridge, std = args
    if std:
        ts = standardize(ts)
    target_lags = None
    if lag == "bic":
        lag, target_lags = select_global_lag(ts, p_max, spec)
    m = gc_matrix(ts, int(lag), spec, ridge)
    m.target_lags = target_lags
    return m


def compute_gc(subjects, spec: FeatureMapSpec, lag, p_max: int = 5, ridge: float = 0.0,
               standardize_data: bool = True, jobs: int = 1) -> list[GCMatrix]:
    args = [(s.ts, spec, lag, p_max, ridge, standardize_data) for s in subjects]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_subject_gc, args))
    return [_subject_gc(a) for a in args]


def _fc(ts: TimeSeriesMatrix, fisher: bool) -> np.ndarray:
    r = cn.pearson_fc(ts)
    return cn.fisher_z(r) if fisher else r


def grid_from_config(cfg) -> list[FeatureMapSpec]:
    g = cfg["grid"]
    if g.get("spec"):
        return [FeatureMapSpec.parse(s) for s in _split_specs(g["spec"])]
    kind = g["kind"].upper()
    return ml.grid_specs(kind, _ints(g["r"]), _floats(g["eta"]), _floats(g["sigma"]))


def _split_specs(text: str) -> list[str]:
    """Split a comma list of specs, keeping ``eta=``/``sigma=``/``r=`` with their spec."""
    out: list[str] = []
    for tok in (t.strip() for t in text.split(",")):
        if not tok:
            continue
        if out and tok.split("=")[0].strip().lower() in ("r", "eta", "sigma") and ":" not in tok:
            out[-1] += "," + tok
        else:
            out.append(tok)
    return out


def run_grid(cfg, subjects, jobs: int = 1):
    gc_cfg, cv = cfg["gc"], cfg["cv"]
    lag = gc_cfg["lag"] if gc_cfg["lag"] == "bic" else int(gc_cfg["lag"])
    cache: dict[str, list[GCMatrix]] = {}
    labels = np.array([s.label for s in subjects])

    def builder(spec):
        mats = compute_gc(subjects, spec, lag, int(gc_cfg["p_max"]), float(gc_cfg["ridge"]),
                          gc_cfg.getboolean("standardize"), jobs)
        cache[str(spec)] = mats
        X = np.vstack([m.values.reshape(-1) for m in mats])
        return X, labels

    result = ml.grid_search(builder, grid_from_config(cfg), int(cv["folds"]),
                            int(cv["repeats"]), float(cv["C"]), int(cv["seed"]))
    return result, cache[str(result.best_spec)]


def run_pipeline(config, out_dir, jobs: int = 1, command: str = "pipeline") -> dict:
    """Execute every stage; returns a summary dict (also written as summary.json)."""
    cfg = load_config(config)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    flags = {sec: dict(cfg[sec]) for sec in cfg.sections()}
    manifest = io.RunManifest(command, {"config": flags, "jobs": jobs},
                              int(cfg["cv"]["seed"]))
    if not str(config).lstrip().startswith("["):
        manifest.add_inputs([config])
    summary: dict = {"source": cfg["run"]["source"]}
    written: list[Path] = []

    def stage(name):
        def wrap(fn):
            logger.info("stage %s", name)
            try:
                return fn()
            except Exception as exc:
                manifest.add_outputs(written, out)
                manifest.flags["failed_stage"] = name
                manifest.write(out)
                raise StageError(name, exc) from exc
        return wrap

    subjects = stage("load")(lambda: load_subjects(cfg, out))
    if cfg["run"]["source"] == "data":
        manifest.add_inputs([s.source for s in subjects])
    else:
        written += [s.source for s in subjects]
    labels = np.array([s.label for s in subjects])
    high = [k for k, s in enumerate(subjects) if s.label == 1]
    low = [k for k, s in enumerate(subjects) if s.label == 0]

    grid, gcs = stage("grid")(lambda: run_grid(cfg, subjects, jobs))
    written.append(io.write_json(out / "grid.json", {**grid.to_dict(), "manifest": io.MANIFEST_NAME}))
    summary["best_spec"] = str(grid.best_spec)

    fisher = cfg["mask"].getboolean("fisher_z")

    def gc_stage():
        fcs = [_fc(standardize(s.ts) if cfg["gc"].getboolean("standardize") else s.ts, fisher)
               for s in subjects]
        for s, m, f in zip(subjects, gcs, fcs):
            extra = {"subject": s.name, "label": s.label}
            if m.target_lags is not None:
                extra["target_lags"] = m.target_lags
            written.extend(io.write_gc(out / "gc" / s.name, m, extra))
            written.append(io.write_matrix_csv(out / "fc" / f"{s.name}.fc.csv", f))
        return fcs
    fcs = stage("gc")(gc_stage)
    ec_vals = [m.values for m in gcs]

    def mask_stage():
        mk = cfg["mask"]
        alpha, q = float(mk["alpha"]), float(mk["q"])
        ec_raw = cn.group_difference_mask([ec_vals[k] for k in high], [ec_vals[k] for k in low],
                                          alpha, q)
        ec_mask = cn.prune_bidirectional(ec_raw) if mk.getboolean("prune") else ec_raw
        fc_mask = cn.group_difference_mask([fcs[k] for k in high], [fcs[k] for k in low],
                                           alpha, q, symmetric=True)
        fused = cn.fuse_masks(ec_mask, fc_mask)
        diff = cn.group_mean_diff([ec_vals[k] for k in high], [ec_vals[k] for k in low])
        written.extend(io.write_mask(out / "masks" / "ec_raw.csv", ec_raw))
        written.extend(io.write_mask(out / "masks" / "ec.csv", ec_mask))
        written.extend(io.write_mask(out / "masks" / "fc.csv", fc_mask))
        written.extend(io.write_mask(out / "masks" / "fused.csv", fused))
        written.append(io.write_matrix_csv(out / "masks" / "gc_mean_diff.csv", diff))
        return ec_raw, ec_mask, fc_mask, fused
    ec_raw, ec_mask, fc_mask, fused = stage("masks")(mask_stage)
    summary["n_selected"] = {"ec_raw": ec_raw.n_selected, "ec": ec_mask.n_selected,
                             "fc": fc_mask.n_selected, "fused": fused.n_selected}

    subj_rows = [(m, f, s.label) for m, f, s in zip(gcs, fcs, subjects)]
    fc_full = cfg["features"].getboolean("fc_full")
    mode = cfg["features"]["mode"].upper()

    def feature_stage():
        tables = {m: cn.assemble_features(subj_rows, None, None, m, fc_full)
                  for m in ("EC", "FC", "EC+FC")}
        written.extend(io.write_features(out / "features" / "features.csv", tables[mode]))
        return tables
    tables = stage("features")(feature_stage)

    def classify_stage():
        cv = cfg["cv"]
        reports = {m: ml.cross_validate(t.features, t.labels, int(cv["folds"]),
                                        int(cv["repeats"]), float(cv["C"]), int(cv["seed"]))
                   for m, t in tables.items()}
        doc = {"mode": mode, "spec": str(grid.best_spec), **reports[mode].to_dict(),
               "by_mode": {m: r.to_dict() for m, r in reports.items()},
               "manifest": io.MANIFEST_NAME}
        written.append(io.write_json(out / "eval.json", doc))
        return reports
    reports = stage("classify")(classify_stage)
    summary["accuracy"] = {m: r.mean_accuracy for m, r in reports.items()}
    summary["mode"] = mode

    if cfg["ablation"].getboolean("enabled"):
        def ablation_stage():
            ab, cv = cfg["ablation"], cfg["cv"]
            table = tables["EC"]
            # strongest group differences are removed first
            pvals = cn.cell_pvalues([ec_vals[k] for k in high], [ec_vals[k] for k in low])
            cols = table.columns("EC", fused.mask)
            cols.sort(key=lambda c: (pvals[table.feature_index[c][0], table.feature_index[c][1]], c))
            curve = ml.ablation(table.features, table.labels, cols, float(ab["step"]),
                                int(cv["folds"]), int(ab["repeats"]), float(cv["C"]),
                                int(cv["seed"]), int(ab["draws"]))
            written.append(io.write_rows(out / "ablation.csv", curve.rows(),
                                         header=["removal_fraction", "removed",
                                                 "fused_accuracy", "random_accuracy"]))
            return curve
        curve = stage("ablation")(ablation_stage)
        steps = list(zip(curve.ranked_accuracy[1:], curve.random_accuracy[1:]))
        summary["ablation_below_fraction"] = (
            sum(a < b for a, b in steps) / len(steps) if steps else 0.0)

    def metrics_stage():
        mc = cfg["metrics"]
        eff = nm.compare_group_efficiency([ec_vals[k] for k in high], [ec_vals[k] for k in low],
                                          float(mc["alpha"]))
        deg_fused = nm.node_degrees(fused.mask)
        deg_ec = nm.node_degrees(ec_mask.mask)
        mean_high = np.mean([ec_vals[k] for k in high], axis=0)
        eloc, eloc_mean = nm.local_efficiency(mean_high)
        doc = {
            "global_efficiency": {"high": eff.values_a, "low": eff.values_b,
                                  "mean_high": eff.mean_a, "mean_low": eff.mean_b,
                                  "t": eff.t, "p": eff.p, "alpha": eff.alpha,
                                  "significant": eff.significant},
            "local_efficiency_mean_high_graph": {"per_node": eloc, "mean": eloc_mean},
            "degrees": {"fused": deg_fused, "ec": deg_ec},
            "hubs": {"fused": nm.hub_report(deg_fused), "ec": nm.hub_report(deg_ec)},
            "manifest": io.MANIFEST_NAME,
        }
        written.append(io.write_json(out / "metrics.json", doc))
        return eff
    eff = stage("metrics")(metrics_stage)
    summary["global_efficiency"] = {"high": eff.mean_a, "low": eff.mean_b, "p": eff.p}

    written.append(io.write_json(out / "summary.json", {**summary, "manifest": io.MANIFEST_NAME}))
    manifest.add_outputs(written, out)
    manifest.write(out)
    return summary
