import cvxpy as cp
import numpy as np
import pytest

from kgc import mlpipe as ml
from kgc.featmap import FeatureMapSpec


def _data(rng, n=60, f=5, sep=1.5):
    y = np.repeat([0, 1], n // 2)
    X = rng.normal(size=(n, f))
    X[y == 1, 0] += sep
    return X, y


def _objective(model, X, y):
    Z = (X - model.mean) / model.scale
    ys = np.where(y == 1, 1.0, -1.0)
    hinge = np.maximum(0, 1 - ys * (Z @ model.weights + model.bias)).sum()
    b = model.bias / ml.BIAS_SCALE
    return 0.5 * (model.weights @ model.weights + b * b) + model.C * hinge


def _cvx_objective(X, y, C):
    mean, scale = X.mean(axis=0), X.std(axis=0)
    Z = np.column_stack([(X - mean) / scale, np.full(len(y), ml.BIAS_SCALE)])
    ys = np.where(y == 1, 1.0, -1.0)
    w = cp.Variable(Z.shape[1])
    obj = 0.5 * cp.sum_squares(w) + C * cp.sum(cp.pos(1 - cp.multiply(ys, Z @ w)))
    prob = cp.Problem(cp.Minimize(obj))
    prob.solve(solver=cp.CLARABEL)
    return prob.value, w.value


@pytest.mark.parametrize("n, f, C", [(60, 5, 1.0), (40, 80, 1.0), (80, 3, 0.1), (50, 10, 10.0)])
def test_svm_reaches_qp_optimum(rng, n, f, C):
    X, y = _data(rng, n, f)
    model = ml.train_linear_svm(X, y, C=C)
    ref, w = _cvx_objective(X, y, C)
    assert _objective(model, X, y) == pytest.approx(ref, rel=1e-4, abs=1e-6)
    Z = np.column_stack([(X - model.mean) / model.scale, np.full(n, ml.BIAS_SCALE)])
    agree = np.mean(model.predict(X) == (Z @ w > 0))
    assert agree >= 0.98


def test_svm_validation(rng):
    X, y = _data(rng)
    with pytest.raises(ml.ClassificationError):
        ml.train_linear_svm(X, np.zeros(60))
    with pytest.raises(ml.ClassificationError):
        ml.train_linear_svm(X, y, C=0)
    with pytest.raises(ml.ClassificationError):
        ml.train_linear_svm(X[:10], y)
    bad = X.copy()
    bad[0, 0] = np.nan
    with pytest.raises(ml.ClassificationError):
        ml.train_linear_svm(bad, y)


def test_svm_constant_feature(rng):
    X, y = _data(rng)
    X[:, 1] = 4.0
    model = ml.train_linear_svm(X, y)
    assert np.isfinite(model.weights).all()


def test_stratified_folds_balance():
    y = np.array([0] * 23 + [1] * 17)
    fold = ml.stratified_folds(y, 10, np.random.default_rng(0))
    sizes = np.bincount(fold, minlength=10)
    assert sizes.max() - sizes.min() <= 1
    for cls in (0, 1):
        per = np.bincount(fold[y == cls], minlength=10)
        assert per.max() - per.min() <= 1


def test_cross_validate_report(rng):
    X, y = _data(rng, sep=4.0)
    rep = ml.cross_validate(X, y, k=5, repeats=4, seed=3)
    assert len(rep.accuracies) == 4
    assert rep.mean_accuracy == pytest.approx(np.mean(rep.accuracies), abs=1e-12)
    assert rep.std_accuracy == pytest.approx(np.std(rep.accuracies), abs=1e-12)
    assert rep.mean_accuracy > 0.9
    again = ml.cross_validate(X, y, k=5, repeats=4, seed=3)
    assert again.accuracies == rep.accuracies


def test_cross_validate_rejects_small_class(rng):
    X, y = _data(rng, n=20)
    with pytest.raises(ml.ClassificationError, match="too small"):
        ml.cross_validate(X, y, k=11)


def test_grid_specs_and_tiebreak(rng):
    specs = ml.grid_specs("RSP", [1, 2], [0.5, 1.0], [0.5])
    assert len(specs) == 4
    assert len(ml.grid_specs("RSP", [1])) == 100
    X, y = _data(rng, sep=5.0)
    res = ml.grid_search(lambda s: (X, y), specs, k=5, repeats=2)
    # identical data for every spec: smallest r, sigma, eta wins
    assert res.best_spec == FeatureMapSpec("RSP", 1, 0.5, 0.5)
    assert len(res.to_dict()["grid"]) == 4
    with pytest.raises(ml.ClassificationError):
        ml.grid_search(lambda s: (X, y), [])


def test_ablation_removes_signal(rng):
    X, y = _data(rng, n=60, f=20, sep=0.0)
    X[y == 1, :4] += 2.0
    curve = ml.ablation(X, y, [0, 1, 2, 3], step_fraction=0.25, k=5, repeats=2,
                        random_draws=3)
    assert curve.removed == [0, 1, 2, 3, 4]
    assert curve.removal_fraction == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert curve.ranked_accuracy[0] == curve.random_accuracy[0]
    assert curve.ranked_accuracy[-1] < curve.random_accuracy[-1]
    assert len(list(curve.rows())) == 5


def test_ablation_all_features_removed(rng):
    X, y = _data(rng, n=30, f=2)
    curve = ml.ablation(X, y, [0, 1], step_fraction=1.0, k=5, repeats=1, random_draws=1)
    assert curve.ranked_accuracy[-1] == 0.5
    with pytest.raises(ml.ClassificationError):
        ml.ablation(X, y, [5])
