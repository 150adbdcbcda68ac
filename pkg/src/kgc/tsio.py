"""Time-series ingestion, standardization and lagged regression designs."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np


class TimeSeriesError(ValueError):
    """Raised for malformed or unusable time-series input."""


@dataclass(frozen=True)
class TimeSeriesMatrix:
    """T x d matrix; rows are time points, columns are channels."""

    data: np.ndarray
    channel_names: Optional[list[str]] = None

    def __post_init__(self):
        arr = np.array(self.data, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2:
            raise TimeSeriesError(f"expected a 2-D array, got {arr.ndim}-D")
        if arr.shape[0] < 2:
            raise TimeSeriesError(f"need at least 2 time points, got {arr.shape[0]}")
        if arr.shape[1] < 1:
            raise TimeSeriesError("need at least one channel")
        if not np.all(np.isfinite(arr)):
            r, c = np.argwhere(~np.isfinite(arr))[0]
            raise TimeSeriesError(f"non-finite value at row {r}, column {c}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        if self.channel_names is not None:
            names = list(self.channel_names)
            if len(names) != arr.shape[1]:
                raise TimeSeriesError(
                    f"{len(names)} channel names for {arr.shape[1]} channels")
            object.__setattr__(self, "channel_names", names)

    @property
    def T(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    def names(self) -> list[str]:
        if self.channel_names is not None:
            return list(self.channel_names)
        return [str(k) for k in range(self.d)]


@dataclass(frozen=True)
class LaggedDesign:
    X: np.ndarray
    y: np.ndarray
    p: int
    source_channels: tuple[int, ...] = field(default_factory=tuple)


def load_csv(path, has_header: Optional[bool] = None) -> TimeSeriesMatrix:
    """Read a time-major CSV file.

    ``has_header=None`` sniffs the first row: it is treated as a header when
    any of its cells fails to parse as a number.
    """
    path = Path(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise TimeSeriesError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise TimeSeriesError(f"{path}: empty file")

    names = None
    if has_header is None:
        has_header = not all(_is_number(c) for c in rows[0])
    if has_header:
        names = [c.strip() for c in rows[0]]
        rows = rows[1:]

    ncol = len(names) if names is not None else len(rows[0]) if rows else 0
    values = []
    for r_idx, row in enumerate(rows):
        lineno = r_idx + (2 if has_header else 1)
        if len(row) != ncol:
            raise TimeSeriesError(
                f"{path}: line {lineno} has {len(row)} columns, expected {ncol}")
        parsed = []
        for c_idx, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise TimeSeriesError(
                    f"{path}: non-numeric cell {cell!r} at line {lineno}, "
                    f"column {c_idx + 1}") from None
            if not np.isfinite(v):
                raise TimeSeriesError(
                    f"{path}: non-finite cell {cell!r} at line {lineno}, column {c_idx + 1}")
            parsed.append(v)
        values.append(parsed)
    if len(values) < 2:
        raise TimeSeriesError(f"{path}: need at least 2 time points, got {len(values)}")
    return TimeSeriesMatrix(np.array(values, dtype=float), names)


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def standardize(ts: TimeSeriesMatrix) -> TimeSeriesMatrix:
    """Zero mean, unit sample SD per column; constant columns become zeros."""
    x = ts.data
    mean = x.mean(axis=0)
    sd = x.std(axis=0, ddof=1)
    out = np.zeros_like(x)
    # relative test so columns constant up to rounding are caught too
    live = sd > 1e-13 * np.maximum(1.0, np.abs(mean))
    out[:, live] = (x[:, live] - mean[live]) / sd[live]
    return TimeSeriesMatrix(out, ts.channel_names)


def build_lagged_design(ts: TimeSeriesMatrix, target: int, sources: Sequence[int],
                        p: int) -> LaggedDesign:
    """Stack lags 1..p of each source channel against ``target``.

    Rows run in ascending time (first row predicts sample ``p``).  Columns
    are lag-major: ``[s0(t-1), s1(t-1), ..., s0(t-p), s1(t-p), ...]``.
    """
    T, d = ts.data.shape
    if not isinstance(p, (int, np.integer)) or p < 1 or p >= T:
        raise TimeSeriesError(f"lag order p={p} must satisfy 1 <= p < T={T}")
    sources = tuple(int(s) for s in sources)
    for idx in (target, *sources):
        if not 0 <= idx < d:
            raise TimeSeriesError(f"channel index {idx} out of range for d={d}")
    x = ts.data
    y = x[p:, target].copy()
    cols = [x[p - k:T - k, s] for k in range(1, p + 1) for s in sources]
    X = np.column_stack(cols) if cols else np.empty((T - p, 0))
    return LaggedDesign(X=X, y=y, p=int(p), source_channels=sources)
