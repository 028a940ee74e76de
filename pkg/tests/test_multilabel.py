import numpy as np
import pytest
from hypothesis import given, strategies as st

from brgbdt import gbdt
from brgbdt.errors import DimensionMismatch, NonFiniteLoss, UnknownLabel
from brgbdt.evaluation import score
from brgbdt.labelmine import LabeledInstance
from brgbdt.multilabel import (BrModel, LinearScorer, LrConfig, binarize, fit_logistic,
                               labels_from_scores, logistic_objective, predict_labels,
                               train_br_gbdt, train_br_lr)

from oracles import sign_rule


def inst(x, *labels):
    return LabeledInstance(np.asarray(x, dtype=float), frozenset(labels))


def test_binarize():
    T = [inst([0.0], "x"), inst([1.0], "x", "y")]
    assert [t for _, t in binarize(T, "y")] == [-1.0, 1.0]
    assert [t for _, t in binarize(T, "x")] == [1.0, 1.0]
    with pytest.raises(UnknownLabel):
        binarize(T, "z")


def test_binarize_counting_identity(rng):
    labels = list("abcde")
    T = [inst(rng.normal(size=2), *rng.choice(labels, size=int(rng.integers(1, 4)), replace=False))
         for _ in range(50)]
    positives = sum(sum(t > 0 for _, t in binarize(T, lab, labels)) for lab in labels)
    assert positives == sum(len(i.labels) for i in T)


def test_labels_from_scores_examples():
    U = ["l1", "l2", "l3"]
    assert labels_from_scores([0.3, -0.2, 0.1], U) == ["l1", "l3"]
    assert labels_from_scores([-0.5, -0.1, -0.9], U) == ["l2"]
    assert labels_from_scores([-0.1, -0.1], ["l1", "l2"]) == ["l1"]
    assert labels_from_scores([0.0, -1.0], ["l1", "l2"]) == ["l1"]
    with pytest.raises(DimensionMismatch):
        labels_from_scores([1.0], U)


@given(st.lists(st.sampled_from([-2.0, -1.0, -0.5, 0.0, 0.5, 1.0]), min_size=1, max_size=8))
def test_labels_from_scores_rule(scores):
    U = [f"l{j}" for j in range(len(scores))]
    got = labels_from_scores(scores, U)
    assert got and got == [U[j] for j in sign_rule(scores)]


def test_single_label_reduces_to_gbdt(rng):
    X = rng.normal(size=(30, 2))
    T = [inst(x, "a") if x[0] > 0 else inst(x, "b") for x in X]
    cfg = gbdt.TrainConfig(iterations=10)
    m = train_br_gbdt(T, cfg, universe=["a", "b"])
    y = np.where(X[:, 0] > 0, 1.0, -1.0)
    direct = gbdt.train(X, y, cfg)
    np.testing.assert_array_equal(m.scorers[0].predict(X), direct.predict(X))


def test_degenerate_label_constant(caplog):
    X = np.array([[0.0], [1.0], [2.0]])
    T = [inst(X[0], "a"), inst(X[1], "a", "b"), inst(X[2], "a")]
    m = train_br_gbdt(T, gbdt.TrainConfig(iterations=5), universe=["a", "b", "c"])
    np.testing.assert_array_equal(m.scorers[0].predict(X), [1.0, 1.0, 1.0])
    np.testing.assert_array_equal(m.scorers[2].predict(X), [-1.0, -1.0, -1.0])
    assert "no negative" in caplog.text and "no positive" in caplog.text
    lr = train_br_lr(T, universe=["a", "b", "c"])
    np.testing.assert_array_equal(lr.scorers[2].predict(X), [-1.0, -1.0, -1.0])


def test_universe_must_cover_labels():
    with pytest.raises(UnknownLabel):
        train_br_gbdt([inst([0.0], "a"), inst([1.0], "b")], universe=["a"])


def test_sign_and_xor_fit_training_set():
    g = np.linspace(-1, 1, 8)
    X = np.array([[a, b] for a in g for b in g])
    A = X[:, 0] > 0
    B = (X[:, 0] > 0) ^ (X[:, 1] > 0)
    T = [LabeledInstance(x, frozenset(n for n, on in (("A", a), ("B", b)) if on))
         for x, a, b in zip(X, A, B)]
    m = train_br_gbdt(T, gbdt.TrainConfig(iterations=30, max_depth=2))
    S = m.decision_function(X)
    for j, lab in enumerate(m.universe):
        truth = [{lab} & t.labels for t in T]
        got = [{lab} if s > 0 else set() for s in S[:, j]]
        assert score(truth, got, [lab]).f1 == 1.0


def test_per_label_independence(rng):
    X = rng.normal(size=(40, 3))
    T = [inst(x, *(["a"] if x[0] > 0 else []), *(["b"] if x[1] > 0 else []), "c") for x in X]
    cfg = gbdt.TrainConfig(iterations=8)
    full = train_br_gbdt(T, cfg, universe=["a", "b", "c"])
    dropped = train_br_gbdt([LabeledInstance(t.features, t.labels - {"b"}) for t in T], cfg,
                            universe=["a", "c"])
    for lab, j_full, j_drop in (("a", 0, 0), ("c", 2, 1)):
        np.testing.assert_array_equal(full.scorers[j_full].predict(X),
                                      dropped.scorers[j_drop].predict(X))


def test_parallel_training_matches_serial(rng):
    X = rng.normal(size=(40, 3))
    T = [inst(x, "a" if x[0] > 0 else "b", "c" if x[2] > 0 else "d") for x in X]
    cfg = gbdt.TrainConfig(iterations=6)
    a = train_br_gbdt(T, cfg, n_jobs=1).decision_function(X)
    b = train_br_gbdt(T, cfg, n_jobs=3).decision_function(X)
    np.testing.assert_array_equal(a, b)


def test_predict_labels_never_empty_and_dims(rng):
    X = rng.normal(size=(30, 2))
    T = [inst(x, "p" if x[0] > 0 else "q") for x in X]
    m = train_br_lr(T)
    for x in rng.normal(size=(20, 2)) * 5:
        assert predict_labels(m, x)
    with pytest.raises(DimensionMismatch):
        predict_labels(m, [1.0, 2.0, 3.0])


def test_logistic_separable():
    X = np.array([[-2.0], [-1.0], [-0.5], [0.5], [1.0], [2.0]])
    y = np.array([-1, -1, -1, 1, 1, 1.0])
    s = fit_logistic(X, y, LrConfig(epochs=2000, step_size=0.5, l2=0.0))
    assert np.all(np.sign(s.predict(X)) == y)


def test_logistic_large_penalty_shrinks_weights(rng):
    X = rng.normal(size=(50, 3))
    y = np.where(X[:, 0] + 0.2 > 0, 1.0, -1.0)
    s = fit_logistic(X, y, LrConfig(epochs=3000, step_size=1e-3, l2=1e3))
    assert np.max(np.abs(s.weights)) < 1e-3
    np.testing.assert_allclose(s.predict(X), s.bias, atol=1e-2)


def test_logistic_gradient_finite_difference(rng):
    X = rng.normal(size=(25, 4))
    y = np.where(rng.random(25) < 0.5, 1.0, -1.0)
    w, b, l2 = rng.normal(size=4), 0.3, 0.1
    _, gw, gb = logistic_objective(w, b, X, y, l2)
    eps = 1e-6
    for i in range(4):
        e = np.zeros(4)
        e[i] = eps
        fd = (logistic_objective(w + e, b, X, y, l2)[0]
              - logistic_objective(w - e, b, X, y, l2)[0]) / (2 * eps)
        assert abs(fd - gw[i]) < 1e-5
    fd = (logistic_objective(w, b + eps, X, y, l2)[0]
          - logistic_objective(w, b - eps, X, y, l2)[0]) / (2 * eps)
    assert abs(fd - gb) < 1e-5


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_logistic_divergence_raises():
    X = np.array([[1e3], [-1e3]])
    with pytest.raises(NonFiniteLoss):
        fit_logistic(X, np.array([1.0, -1.0]), LrConfig(epochs=50, step_size=1e6, l2=10.0))


def test_constant_scorer_model():
    m = BrModel(["a", "b"], [LinearScorer(np.zeros(1), -0.2), LinearScorer(np.zeros(1), -0.1)],
                "br-lr", 1)
    assert predict_labels(m, [0.0]) == ["b"]
