"""Pairwise Granger causality in polynomial feature spaces."""
from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .featmap import FeatureMapSpec, expand, expanded_dim
from .tsio import TimeSeriesMatrix, build_lagged_design

logger = logging.getLogger(__name__)

EPS_VAR = 1e-12


class GCError(ValueError):
    pass


@dataclass
class RegressionFit:
    weights: np.ndarray
    residual_variance: float
    n_obs: int
    ridge: float = 0.0
    rank_deficient: bool = False


@dataclass
class GCMatrix:
    """``values[j, i]`` is the causality of channel j onto channel i."""

    values: np.ndarray
    lag: int
    spec: FeatureMapSpec
    channels: Optional[list[str]] = None
    target_lags: Optional[list[int]] = field(default=None)

    @property
    def d(self) -> int:
        return self.values.shape[0]

    def to_dict(self) -> dict:
        out = {
            "channels": self.channels or [str(k) for k in range(self.d)],
            "lag": int(self.lag),
            "spec": str(self.spec),
            "values": [[float(v) for v in row] for row in self.values],
        }
        if self.target_lags is not None:
            out["target_lags"] = [int(p) for p in self.target_lags]
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "GCMatrix":
        return cls(np.array(doc["values"], dtype=float), int(doc["lag"]),
                   FeatureMapSpec.parse(doc["spec"]), list(doc["channels"]),
                   doc.get("target_lags"))


def fit_least_squares(Q, y, ridge: float = 0.0, bias_col: Optional[int] = 0) -> RegressionFit:
    """Least squares (optionally ridge) fit of ``y`` on the columns of ``Q``.

    The ridge penalty skips ``bias_col``.  The system is solved by SVD-based
    ``lstsq``; rank-deficient unpenalized systems get the minimum-norm solution
    and ``rank_deficient=True``.
    """
    Q = np.asarray(Q, dtype=float)
    y = np.asarray(y, dtype=float)
    if Q.ndim != 2 or Q.shape[0] < 1 or Q.shape[1] < 1:
        raise GCError(f"design must be N x D with N, D >= 1, got shape {Q.shape}")
    if y.shape != (Q.shape[0],):
        raise GCError(f"target length {y.shape} does not match design rows {Q.shape[0]}")
    if ridge < 0:
        raise GCError("ridge must be non-negative")
    n, D = Q.shape
    if ridge > 0:
        pen = np.sqrt(ridge) * np.eye(D)
        if bias_col is not None and 0 <= bias_col < D:
            pen[bias_col, bias_col] = 0.0
        A = np.vstack([Q, pen])
        b = np.concatenate([y, np.zeros(D)])
    else:
        A, b = Q, y
    w, _, rank, _ = np.linalg.lstsq(A, b, rcond=None)
    resid = y - Q @ w
    return RegressionFit(weights=w, residual_variance=float(resid @ resid) / n,
                         n_obs=n, ridge=float(ridge), rank_deficient=bool(rank < D))


def _residual_variance(ts: TimeSeriesMatrix, target: int, sources, p: int,
                       spec: FeatureMapSpec, ridge: float, skip: int = 0) -> float:
    des = build_lagged_design(ts, target, sources, p)
    Q = expand(des.X[skip:], spec)
    return fit_least_squares(Q, des.y[skip:], ridge).residual_variance


def _gci_from_variances(var_r: float, var_f: float) -> float:
    if var_r <= EPS_VAR and var_f <= EPS_VAR:
        return 0.0
    return max(0.0, float(np.log(max(var_r, EPS_VAR) / max(var_f, EPS_VAR))))


def gci_pair(ts: TimeSeriesMatrix, i: int, j: int, p: int, spec: FeatureMapSpec,
             ridge: float = 0.0) -> float:
    """Causality index of source ``j`` onto target ``i``."""
    if i == j:
        raise GCError("source and target must differ")
    var_r = _residual_variance(ts, i, (i,), p, spec, ridge)
    var_f = _residual_variance(ts, i, (i, j), p, spec, ridge)
    return _gci_from_variances(var_r, var_f)


def gc_matrix(ts: TimeSeriesMatrix, p: int, spec: FeatureMapSpec, ridge: float = 0.0,
              jobs: int = 1) -> GCMatrix:
    """All ordered pairs; the restricted fit is shared across sources of a target."""
    d = ts.d
    if d < 2:
        raise GCError("need at least two channels")

    def column(i: int) -> np.ndarray:
        col = np.zeros(d)
        var_r = _residual_variance(ts, i, (i,), p, spec, ridge)
        for j in range(d):
            if j == i:
                continue
            try:
                var_f = _residual_variance(ts, i, (i, j), p, spec, ridge)
            except Exception as exc:
                raise GCError(f"pair {j}->{i}: {exc}") from exc
            col[j] = _gci_from_variances(var_r, var_f)
        return col

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            cols = list(pool.map(column, range(d)))
    else:
        cols = [column(i) for i in range(d)]
    values = np.column_stack(cols)
    np.fill_diagonal(values, 0.0)
    return GCMatrix(values=values, lag=int(p), spec=spec, channels=ts.channel_names)


def select_lag_bic(ts: TimeSeriesMatrix, target: int, p_max: int,
                   spec: FeatureMapSpec = FeatureMapSpec("LIN")) -> int:
    """BIC-optimal lag of the restricted (own-history) model of ``target``.

    Every candidate is fitted on the same rows (times ``p_max..T-1``) so the
    likelihoods compare.  Ties go to the smaller lag.
    """
    T = ts.T
    if not 1 <= p_max or not p_max < T / 2:
        raise GCError(f"p_max={p_max} must satisfy 1 <= p_max < T/2 (T={T})")
    n = T - p_max
    best_p, best_bic = 1, np.inf
    at_floor = True
    for p in range(1, p_max + 1):
        var = _residual_variance(ts, target, (target,), p, spec, 0.0, skip=p_max - p)
        at_floor &= var <= EPS_VAR
        bic = n * np.log(max(var, EPS_VAR)) + expanded_dim(spec, p) * np.log(n)
        if bic < best_bic:
            best_p, best_bic = p, bic
    return 1 if at_floor else best_p


def select_global_lag(ts: TimeSeriesMatrix, p_max: int,
                      spec: FeatureMapSpec = FeatureMapSpec("LIN")) -> tuple[int, list[int]]:
    """Per-target BIC lags and their mode (smallest lag among ties)."""
    lags = [select_lag_bic(ts, i, p_max, spec) for i in range(ts.d)]
    counts = Counter(lags)
    top = max(counts.values())
    return min(p for p, c in counts.items() if c == top), lags


def accumulated_gci(m) -> float:
    values = m.values if isinstance(m, GCMatrix) else np.asarray(m, dtype=float)
    return float(values.sum())
