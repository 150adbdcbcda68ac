"""Linear SVM classification, repeated stratified CV, grid search, ablation."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from numba import njit

from .featmap import FeatureMapSpec

logger = logging.getLogger(__name__)

EPOCHS = 20000
N_ORDERS = 64


class ClassificationError(ValueError):
    pass


@dataclass
class LinearModel:
    """Decision function ``((x - mean) / scale) @ weights + bias``."""

    weights: np.ndarray
    bias: float
    C: float
    mean: np.ndarray
    scale: np.ndarray

    def decision_function(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return ((X - self.mean) / self.scale) @ self.weights + self.bias

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) > 0).astype(int)


@dataclass
class EvalReport:
    mean_accuracy: float
    std_accuracy: float
    accuracies: list[float]
    folds: int
    repeats: int
    seed: int
    C: float = 1.0

    def to_dict(self) -> dict:
        return {"mean_accuracy": self.mean_accuracy, "std_accuracy": self.std_accuracy,
                "accuracies": list(self.accuracies), "folds": self.folds,
                "repeats": self.repeats, "seed": self.seed, "C": self.C}


BIAS_SCALE = 1.0
TOL = 1e-6


@njit(cache=True)
def _dual_cd(X, y, C, order, epochs, tol):
    # order: bank of visiting orders used cyclically; stops when the
    # projected-gradient spread over an epoch drops below tol
    n, f = X.shape
    alpha = np.zeros(n)
    w = np.zeros(f)
    qd = np.empty(n)
    for i in range(n):
        s = 0.0
        for c in range(f):
            s += X[i, c] * X[i, c]
        qd[i] = s
    for e in range(epochs):
        row = e % order.shape[0]
        hi = -np.inf
        lo = np.inf
        for k in range(n):
            i = order[row, k]
            g = 0.0
            for c in range(f):
                g += w[c] * X[i, c]
            g = y[i] * g - 1.0
            pg = g
            if alpha[i] == 0.0:
                pg = min(g, 0.0)
            elif alpha[i] == C:
                pg = max(g, 0.0)
            hi = max(hi, pg)
            lo = min(lo, pg)
            if pg != 0.0:
                old = alpha[i]
                alpha[i] = min(max(old - g / qd[i], 0.0), C)
                step = (alpha[i] - old) * y[i]
                for c in range(f):
                    w[c] += step * X[i, c]
        if hi - lo < tol:
            return w, e + 1
    return w, epochs


def train_linear_svm(X, y, C: float = 1.0, epochs: int = EPOCHS, seed: int = 0) -> LinearModel:
    """Minimize ``0.5*|w|^2 + C * sum(hinge)`` by dual coordinate descent.

    Features are standardized with training statistics.  The bias rides on a
    constant feature of value ``BIAS_SCALE``, so its effective penalty is
    ``b**2 / (2 * BIAS_SCALE**2)``.  Epochs cycle through ``N_ORDERS`` seeded
    random visiting orders; training stops once the projected-gradient
    spread falls below ``TOL`` or after ``epochs`` epochs.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y).astype(int).reshape(-1)
    if X.ndim != 2 or X.shape[0] != y.size:
        raise ClassificationError(f"X shape {X.shape} does not match {y.size} labels")
    if X.shape[0] < 2 or np.unique(y).size < 2:
        raise ClassificationError("training data needs both classes")
    if not set(np.unique(y)) <= {0, 1}:
        raise ClassificationError("labels must be 0/1")
    if not np.isfinite(X).all():
        raise ClassificationError("non-finite feature values")
    if C <= 0:
        raise ClassificationError("C must be positive")
    n = X.shape[0]
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale <= 1e-12 * np.maximum(1.0, np.abs(mean))] = 1.0
    Z = np.empty((n, X.shape[1] + 1))
    Z[:, :-1] = (X - mean) / scale
    Z[:, -1] = BIAS_SCALE
    ys = np.where(y == 1, 1.0, -1.0)
    rng = np.random.Generator(np.random.PCG64(seed))
    order = rng.permuted(np.tile(np.arange(n, dtype=np.int64), (min(epochs, N_ORDERS), 1)),
                         axis=1)
    w, used = _dual_cd(Z, ys, float(C), order, int(epochs), TOL)
    if used == epochs:
        logger.debug("SVM stopped at the epoch cap (%d)", epochs)
    return LinearModel(w[:-1].copy(), float(w[-1] * BIAS_SCALE), float(C), mean, scale)


def stratified_folds(y, k: int, rng: np.random.Generator) -> np.ndarray:
    """Fold id per sample; classes are dealt round-robin after shuffling."""
    y = np.asarray(y)
    fold = np.empty(y.size, dtype=int)
    offset = 0
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        idx = idx[rng.permutation(idx.size)]
        fold[idx] = (offset + np.arange(idx.size)) % k
        offset = (offset + idx.size) % k
    return fold


def cross_validate(X, y, k: int = 10, repeats: int = 100, C: float = 1.0, seed: int = 0,
                   epochs: int = EPOCHS) -> EvalReport:
    """Repeated stratified k-fold accuracy (pooled over folds within a repeat)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y).astype(int).reshape(-1)
    if X.shape[0] != y.size:
        raise ClassificationError("features and labels disagree in length")
    if y.size < k:
        raise ClassificationError(f"N={y.size} is smaller than k={k}")
    counts = np.bincount(y, minlength=2)
    if counts.min() < k:
        raise ClassificationError(
            f"class sizes {counts.tolist()} too small for {k}-fold stratification")
    accs = []
    for r in range(repeats):
        rng = np.random.Generator(np.random.PCG64([seed, r]))
        fold = stratified_folds(y, k, rng)
        correct = 0
        for f in range(k):
            test = fold == f
            model = train_linear_svm(X[~test], y[~test], C, epochs,
                                     seed=int(rng.integers(2 ** 63)))
            correct += int((model.predict(X[test]) == y[test]).sum())
        accs.append(correct / y.size)
    a = np.asarray(accs)
    return EvalReport(float(a.mean()), float(a.std()), [float(v) for v in a], k, repeats,
                      seed, float(C))


@dataclass
class GridResult:
    best_spec: FeatureMapSpec
    best_report: EvalReport
    results: list[tuple[FeatureMapSpec, EvalReport]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"best_spec": str(self.best_spec), "best": self.best_report.to_dict(),
                "grid": [{"spec": str(s), "mean_accuracy": r.mean_accuracy,
                          "std_accuracy": r.std_accuracy} for s, r in self.results]}


def grid_specs(kind: str = "RSP", r_grid: Sequence[int] = range(1, 6),
               eta_grid: Sequence[float] = (), sigma_grid: Sequence[float] = ()) -> list[FeatureMapSpec]:
    kind = kind.upper()
    if kind == "RSP":
        eta_grid = eta_grid or [round(0.1 * k, 1) for k in range(1, 11)]
        sigma_grid = sigma_grid or [round(0.1 * k, 1) for k in range(1, 11)]
        return [FeatureMapSpec(kind, r, e, s) for r in r_grid for s in sigma_grid for e in eta_grid]
    return [FeatureMapSpec(kind, r) for r in r_grid]


def grid_search(builder: Callable[[FeatureMapSpec], tuple], specs: Sequence[FeatureMapSpec],
                k: int = 10, repeats: int = 100, C: float = 1.0, seed: int = 0,
                epochs: int = EPOCHS) -> GridResult:
    """Cross-validate ``builder(spec) -> (X, y)`` for every spec.

    The winner has the highest mean accuracy; ties prefer smaller r, then
    smaller sigma, then smaller eta.
    """
    if not specs:
        raise ClassificationError("empty grid")
    results = []
    for spec in specs:
        try:
            X, y = builder(spec)
            rep = cross_validate(X, y, k, repeats, C, seed, epochs)
        except Exception as exc:
            raise ClassificationError(f"grid point {spec}: {exc}") from exc
        logger.info("grid %s: %.4f", spec, rep.mean_accuracy)
        results.append((spec, rep))
    best_spec, best_rep = min(
        results, key=lambda sr: (-sr[1].mean_accuracy, sr[0].r, sr[0].sigma, sr[0].eta))
    return GridResult(best_spec, best_rep, results)


@dataclass
class AblationCurve:
    removal_fraction: list[float]
    removed: list[int]
    ranked_accuracy: list[float]
    random_accuracy: list[float]

    def rows(self):
        return zip(self.removal_fraction, self.removed, self.ranked_accuracy,
                   self.random_accuracy)


def ablation(X, y, removal_set: Sequence[int], step_fraction: float = 0.1, k: int = 10,
             repeats: int = 10, C: float = 1.0, seed: int = 0, random_draws: int = 10,
             epochs: int = EPOCHS) -> AblationCurve:
    """Accuracy as growing tranches of ``removal_set`` are dropped from ``X``.

    Step s removes the first ``round(s * step_fraction * |set|)`` columns of the
    set, in the given order.  The baseline removes equally many columns drawn
    uniformly from all of ``X`` (nested tranches per draw), averaged over
    ``random_draws`` draws.  All curves share the CV seed.
    """
    X = np.asarray(X, dtype=float)
    removal_set = [int(c) for c in removal_set]
    F = X.shape[1]
    if any(not 0 <= c < F for c in removal_set):
        raise ClassificationError("removal set references columns outside X")
    if random_draws < 1:
        raise ClassificationError("need at least one random draw")
    n_steps = int(round(1.0 / step_fraction))
    fractions = [min(1.0, round(s * step_fraction, 12)) for s in range(n_steps + 1)]
    sizes = [int(round(f * len(removal_set))) for f in fractions]
    rng = np.random.Generator(np.random.PCG64([seed, 0xAB1A7E]))
    perms = [rng.permutation(F) for _ in range(random_draws)]

    def score(drop) -> float:
        keep = np.setdiff1d(np.arange(F), np.asarray(drop, dtype=int))
        if keep.size == 0:
            # no features left: the bias-only model predicts the majority class
            return float(np.bincount(np.asarray(y, dtype=int)).max() / len(y))
        return cross_validate(X[:, keep], y, k, repeats, C, seed, epochs).mean_accuracy

    ranked, rand = [], []
    cache: dict[int, float] = {}
    for n in sizes:
        ranked.append(score(removal_set[:n]))
        if n not in cache:
            cache[n] = float(np.mean([score(p[:n]) for p in perms]))
        rand.append(cache[n])
    return AblationCurve(fractions, sizes, ranked, rand)
