"""File formats: matrix CSV/JSON, masks, feature tables, run manifests."""
from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import json
import os
import platform
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from . import __version__
from .connectome import SignificanceMask, SubjectFeatureTable
from .gc_engine import GCMatrix

MANIFEST_NAME = "manifest.json"


def fmt(v) -> str:
    """Shortest string that parses back to the same float."""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_rows(path, rows: Iterable[Sequence], header: Optional[Sequence[str]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header is not None:
            w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, int, np.floating, np.integer))
                        and not isinstance(v, bool) else v for v in row])
    return path


def write_matrix_csv(path, values) -> Path:
    return write_rows(path, np.asarray(values).tolist())


def read_matrix(path) -> np.ndarray:
    """Square matrix from a headerless CSV or a JSON document with ``values``."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        values = doc["values"] if isinstance(doc, dict) else doc
        m = np.array(values, dtype=float)
    else:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r]
        try:
            m = np.array([[float(c) for c in r] for r in rows], dtype=float)
        except ValueError as exc:
            raise ValueError(f"{path}: {exc}") from None
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{path}: expected a square matrix, got shape {m.shape}")
    return m


def write_json(path, doc) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_plain(doc), fh, indent=2, allow_nan=True)
        fh.write("\n")
    return path


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_gc(stem, m: GCMatrix, extra: Optional[dict] = None) -> list[Path]:
    stem = Path(stem)
    doc = m.to_dict()
    if extra:
        doc.update(extra)
    return [write_matrix_csv(stem.with_name(stem.name + ".gc.csv"), m.values),
            write_json(stem.with_name(stem.name + ".gc.json"), doc)]


def write_mask(path, mask: SignificanceMask, extra: Optional[dict] = None) -> list[Path]:
    path = Path(path)
    doc = mask.to_dict()
    if extra:
        doc.update(extra)
    return [write_matrix_csv(path, mask.mask), write_json(path.with_suffix(".json"), doc)]


def read_mask(path) -> SignificanceMask:
    m = read_matrix(path)
    return SignificanceMask(np.rint(m).astype(np.int8))


def write_features(path, table: SubjectFeatureTable) -> list[Path]:
    path = Path(path)
    labels = path.with_name(path.stem + ".labels.csv")
    index = path.with_name(path.stem + ".index.json")
    return [
        write_rows(path, table.features.tolist(), header=table.column_names()),
        write_rows(labels, [[int(v)] for v in table.labels], header=["label"]),
        write_json(index, {"columns": [{"source": s, "target": t, "kind": k}
                                       for s, t, k in table.feature_index]}),
    ]


def read_features(path) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if rows and not _numeric(rows[0]):
        rows = rows[1:]
    return np.array([[float(c) for c in r] for r in rows], dtype=float)


def read_labels(path) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if rows and not _numeric(rows[0]):
        rows = rows[1:]
    labels = np.array([int(float(r[0])) for r in rows], dtype=int)
    if not set(np.unique(labels)) <= {0, 1}:
        raise ValueError(f"{path}: labels must be 0/1")
    return labels


def read_index(path) -> list[tuple[int, int, str]]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return [(int(c["source"]), int(c["target"]), str(c["kind"])) for c in doc["columns"]]


def _numeric(row) -> bool:
    try:
        [float(c) for c in row]
    except ValueError:
        return False
    return True


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def timestamp() -> str:
    """UTC time, or ``SOURCE_DATE_EPOCH`` when set (reproducible builds)."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = (_dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc) if epoch
            else _dt.datetime.now(_dt.timezone.utc))
    return when.replace(microsecond=0).isoformat()


@dataclass
class RunManifest:
    command: str
    flags: dict
    seed: Optional[int]
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    version: str = __version__
    python: str = platform.python_version()
    timestamp: str = field(default_factory=timestamp)

    def add_inputs(self, paths: Iterable) -> None:
        for p in paths:
            self.inputs[str(p)] = sha256(p)

    def add_outputs(self, paths: Iterable, root: Optional[Path] = None) -> None:
        for p in paths:
            p = Path(p)
            key = str(p.relative_to(root)) if root is not None else str(p)
            self.outputs[key] = sha256(p)

    def write(self, directory, name: str = MANIFEST_NAME) -> Path:
        self.outputs = dict(sorted(self.outputs.items()))
        self.inputs = dict(sorted(self.inputs.items()))
        return write_json(Path(directory) / name, asdict(self))
