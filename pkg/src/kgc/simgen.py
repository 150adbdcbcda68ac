"""Synthetic causal systems with known ground truth, and detection scoring.

Random numbers come from numpy's ``Generator`` with the PCG64 bit generator,
seeded directly from the integer seed; normal variates use numpy's ziggurat
``standard_normal``.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .featmap import FeatureMapSpec
from .gc_engine import GCMatrix, accumulated_gci, gc_matrix, select_global_lag
from .tsio import TimeSeriesMatrix, standardize

logger = logging.getLogger(__name__)

BURN_IN = 100
DIVERGENCE_LIMIT = 1e6
MAX_RESAMPLES = 1000


@dataclass(frozen=True)
class GroundTruthGraph:
    d: int
    edges: frozenset

    def __post_init__(self):
        edges = frozenset((int(s), int(t)) for s, t in self.edges)
        for s, t in edges:
            if s == t:
                raise ValueError(f"self-loop {s}->{t}")
            if not (0 <= s < self.d and 0 <= t < self.d):
                raise ValueError(f"edge {s}->{t} outside {self.d} channels")
        object.__setattr__(self, "edges", edges)

    def as_list(self) -> list[list[int]]:
        return [list(e) for e in sorted(self.edges)]


@dataclass
class Simulation:
    ts: TimeSeriesMatrix
    truth: GroundTruthGraph
    seed: int
    seed_used: int
    resamples: int = 0


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def gen_linear(M: int = 1000, seed: int = 0) -> Simulation:
    """Three-channel linear system where channel 0 drives channels 1 and 2."""
    if M < 10:
        raise ValueError("M must be >= 10")
    rng = _rng(seed)
    n = M + BURN_IN
    tau = rng.standard_normal((n, 3))
    x = np.empty((n, 3))
    x[0] = 0.02 * rng.standard_normal(3)
    for t in range(1, n):
        prev = x[t - 1, 0]
        x[t, 0] = 0.441 * prev + 0.02 * tau[t, 0]
        x[t, 1] = 0.8 * prev + 0.02 * tau[t, 1]
        x[t, 2] = -0.7 * prev + 0.02 * tau[t, 2]
    return Simulation(TimeSeriesMatrix(x[BURN_IN:]), GroundTruthGraph(3, {(0, 1), (0, 2)}),
                      seed, seed)


def _quadratic_maps(M: int, rng, a: float, s: float, e: float) -> np.ndarray:
    n = M + BURN_IN
    tau = rng.standard_normal((n, 3))
    x = np.empty((n, 3))
    x[0] = rng.uniform(-0.5, 0.5, 3)
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(1, n):
            q = 1.0 - a * x[t - 1] ** 2
            x[t, 0] = (1 - e) * q[0] + e * q[1] + s * tau[t, 0]
            x[t, 1] = q[1] + s * tau[t, 1]
            x[t, 2] = (1 - e) * q[2] + e * q[0] + s * tau[t, 2]
            if not np.all(np.abs(x[t]) <= DIVERGENCE_LIMIT):
                return None
    return x[BURN_IN:]


def gen_nonlinear(M: int = 1000, seed: int = 0, a: float = 1.8, s: float = 0.02,
                  e: float = 0.2) -> Simulation:
    """Coupled quadratic maps: channel 1 drives 0, channel 0 drives 2.

    Divergent trajectories are discarded and regenerated with seed+1, seed+2, ...
    """
    if M < 10:
        raise ValueError("M must be >= 10")
    for k in range(MAX_RESAMPLES):
        x = _quadratic_maps(M, _rng(seed + k), a, s, e)
        if x is not None:
            if k:
                logger.info("seed %d diverged; used seed %d", seed, seed + k)
            return Simulation(TimeSeriesMatrix(x), GroundTruthGraph(3, {(1, 0), (0, 2)}),
                              seed, seed + k, resamples=k)
    raise RuntimeError(f"quadratic maps diverged for {MAX_RESAMPLES} seeds from {seed}")


def gen_coupled_subject(coupling: float, n_channels: int = 12, drivers: int = 3,
                        targets_per_driver: int = 3, M: int = 200, seed: int = 0,
                        coupling_spread: float = 0.0) -> Simulation:
    """Multi-driver generalisation of the three-channel linear system.

    Channels ``0..drivers-1`` are AR(1) drivers (coefficient 0.441); each drives
    ``targets_per_driver`` channels with lag-1 weight ``+-coupling`` (signs
    alternate).  Remaining channels are white noise.  ``coupling_spread``
    multiplies every edge weight by an independent ``1 + spread * N(0, 1)``
    factor for subject-level variability.
    """
    n_targets = drivers * targets_per_driver
    if drivers + n_targets > n_channels:
        raise ValueError("not enough channels for the requested drivers and targets")
    rng = _rng(seed)
    n = M + BURN_IN
    tau = rng.standard_normal((n, n_channels))
    coef = np.zeros((n_channels, n_channels))  # coef[src, dst]
    edges = set()
    tgt = drivers
    for dv in range(drivers):
        coef[dv, dv] = 0.441
        for k in range(targets_per_driver):
            sign = 1.0 if k % 2 == 0 else -1.0
            coef[dv, tgt] = sign * coupling
            edges.add((dv, tgt))
            tgt += 1
    if coupling_spread:
        mask = coef != 0
        np.fill_diagonal(mask, False)
        coef[mask] *= 1.0 + coupling_spread * rng.standard_normal(mask.sum())
    x = np.empty((n, n_channels))
    x[0] = 0.02 * rng.standard_normal(n_channels)
    for t in range(1, n):
        x[t] = x[t - 1] @ coef + 0.02 * tau[t]
    return Simulation(TimeSeriesMatrix(x[BURN_IN:]), GroundTruthGraph(n_channels, edges),
                      seed, seed)


@dataclass
class MethodSummary:
    spec: str
    true_edge_mean: float
    true_edge_std: float
    non_edge_mean: float
    non_edge_std: float
    detection_rate: float
    accumulated_gci: list[float]
    lags: list[int]
    detected: list[bool] = field(default_factory=list)


@dataclass
class BenchmarkReport:
    model: str
    M: int
    runs: int
    seed: int
    lag: Union[int, str]
    standardized: bool
    run_seeds: list[int]
    seeds_used: list[int]
    resamples: int
    methods: list[MethodSummary]

    def method(self, spec: Union[str, FeatureMapSpec]) -> MethodSummary:
        key = str(spec if isinstance(spec, FeatureMapSpec) else FeatureMapSpec.parse(spec))
        for m in self.methods:
            if m.spec == key:
                return m
        raise KeyError(key)


def detects(values: np.ndarray, truth: GroundTruthGraph) -> bool:
    """True when every true edge outranks every non-edge off the diagonal."""
    d = values.shape[0]
    true_vals = [values[s, t] for s, t in truth.edges]
    other = [values[s, t] for s in range(d) for t in range(d)
             if s != t and (s, t) not in truth.edges]
    if not true_vals:
        return True
    if not other:
        return True
    return min(true_vals) > max(other)


def edge_split(values: np.ndarray, truth: GroundTruthGraph) -> tuple[np.ndarray, np.ndarray]:
    d = values.shape[0]
    on = np.zeros((d, d), dtype=bool)
    for s, t in truth.edges:
        on[s, t] = True
    off = ~on
    np.fill_diagonal(off, False)
    return values[on], values[off]


def simulate(model: str, M: int, seed: int) -> Simulation:
    if model == "linear":
        return gen_linear(M, seed)
    if model == "nonlinear":
        return gen_nonlinear(M, seed)
    raise ValueError(f"unknown model {model!r}; expected 'linear' or 'nonlinear'")


def select_order(model: str, spec: FeatureMapSpec, orders: Sequence[int] = range(1, 6),
                 runs: int = 10, M: int = 1000, seed: int = 10_000, p: int = 1,
                 standardize_data: bool = False,
                 jobs: int = 1) -> tuple[FeatureMapSpec, dict[int, float]]:
    """Pick the polynomial order with the largest mean accumulated GCI.

    Each order is scored over ``runs`` simulations (seeds ``seed..seed+runs-1``,
    kept apart from benchmark seeds); ties go to the smaller order.
    """
    candidates = [FeatureMapSpec(spec.kind, r, spec.eta, spec.sigma) for r in orders]
    if not candidates:
        raise ValueError("no orders to choose from")
    report, _ = run_benchmark(model, M, runs, candidates, p=p, seed=seed,
                              standardize_data=standardize_data, jobs=jobs)
    scores = {c.r: float(np.mean(m.accumulated_gci))
              for c, m in zip(candidates, report.methods)}
    best = max(scores, key=lambda r: (scores[r], -r))
    return candidates[[c.r for c in candidates].index(best)], scores


def _score_run(args):
    model, M, run_seed, methods, p, standardize_data, p_max, ridge = args
    try:
        sim = simulate(model, M, run_seed)
    except Exception as exc:
        raise RuntimeError(f"seed {run_seed}: {exc}") from exc
    ts = standardize(sim.ts) if standardize_data else sim.ts
    scores = []
    for spec in methods:
        lag = select_global_lag(ts, p_max, spec)[0] if p == "bic" else int(p)
        try:
            m = gc_matrix(ts, lag, spec, ridge)
        except Exception as exc:
            raise RuntimeError(f"seed {run_seed}, method {spec}: {exc}") from exc
        t_vals, n_vals = edge_split(m.values, sim.truth)
        scores.append((t_vals, n_vals, accumulated_gci(m), lag, detects(m.values, sim.truth)))
    return sim, scores


def run_benchmark(model: str = "linear", M: int = 1000, runs: int = 50,
                  methods: Sequence[FeatureMapSpec] = (FeatureMapSpec("LIN"),),
                  p: Union[int, str] = 1, seed: int = 0, standardize_data: bool = False,
                  p_max: int = 5, ridge: float = 0.0, keep_series: bool = False,
                  jobs: int = 1):
    """Score every method on ``runs`` fresh simulations (run k uses seed+k).

    Returns ``(report, series)`` where ``series`` is a list of the simulated
    :class:`Simulation` objects when ``keep_series`` is set, else ``None``.
    Runs are independent; ``jobs > 1`` spreads them over processes and the
    results are gathered in run order.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if model not in ("linear", "nonlinear"):
        raise ValueError(f"unknown model {model!r}; expected 'linear' or 'nonlinear'")
    methods = list(methods)
    tasks = [(model, M, seed + k, methods, p, standardize_data, p_max, ridge)
             for k in range(runs)]
    if jobs > 1 and runs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_score_run, tasks))
    else:
        results = [_score_run(t) for t in tasks]

    run_seeds = [seed + k for k in range(runs)]
    seeds_used = [sim.seed_used for sim, _ in results]
    resamples = sum(sim.resamples for sim, _ in results)
    summaries = []
    for n, spec in enumerate(methods):
        rows = [scores[n] for _, scores in results]
        tv = np.concatenate([r[0] for r in rows])
        nv = np.concatenate([r[1] for r in rows])
        summaries.append(MethodSummary(
            spec=str(spec),
            true_edge_mean=float(tv.mean()), true_edge_std=float(tv.std()),
            non_edge_mean=float(nv.mean()), non_edge_std=float(nv.std()),
            detection_rate=float(np.mean([r[4] for r in rows])),
            accumulated_gci=[float(r[2]) for r in rows],
            lags=[int(r[3]) for r in rows],
            detected=[bool(r[4]) for r in rows],
        ))
    report = BenchmarkReport(model=model, M=M, runs=runs, seed=seed, lag=p,
                             standardized=standardize_data, run_seeds=run_seeds,
                             seeds_used=seeds_used, resamples=resamples, methods=summaries)
    return report, ([sim for sim, _ in results] if keep_series else None)
