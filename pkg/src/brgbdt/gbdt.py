"""Gradient boosting of regression trees under squared-error loss.

The model is ``f(x) = f0 + nu * sum_m beta_m * h_m(x)`` where ``f0`` is the
target mean, each ``h_m`` is a regression tree fitted to the current
residuals ``y - f``, ``beta_m`` is the exact line-search step for that tree
and ``nu`` is the shrinkage. With ``nu = 1`` every stage is the plain
stagewise update and the training loss can never increase.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import _splits
from .errors import DimensionMismatch, EmptyTargets, LengthMismatch

logger = logging.getLogger(__name__)

LEAF = -1


@dataclass(frozen=True)
class TrainConfig:
    iterations: int = 100
    max_depth: int | None = 3
    min_samples_leaf: int = 1
    shrinkage: float = 0.1
    seed: int = 0
    patience: int | None = None

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError(f"iterations must be positive, got {self.iterations}")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError(f"max_depth must be positive, got {self.max_depth}")
        if self.min_samples_leaf < 1:
            raise ValueError(f"min_samples_leaf must be positive, got {self.min_samples_leaf}")
        if not 0 < self.shrinkage <= 1:
            raise ValueError(f"shrinkage must be in (0, 1], got {self.shrinkage}")
        if self.patience is not None and self.patience < 1:
            raise ValueError(f"patience must be positive, got {self.patience}")


@dataclass
class RegressionTree:
    """Binary regression tree in flat-array form.

    Node ``i`` is a leaf when ``feature[i] == -1``; otherwise a sample goes
    to ``left[i]`` iff ``x[feature[i]] <= threshold[i]``. Node 0 is the root.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_features: int

    @property
    def n_nodes(self):
        return len(self.feature)

    @property
    def depth(self):
        def walk(i):
            if self.feature[i] == LEAF:
                return 0
            return 1 + max(walk(self.left[i]), walk(self.right[i]))
        return walk(0)

    def apply(self, X) -> np.ndarray:
        """Leaf index reached by each row of ``X``."""
        X = np.asarray(X, dtype=float)
        node = np.zeros(len(X), dtype=np.int64)
        active = self.feature[node] != LEAF
        while active.any():
            rows = np.flatnonzero(active)
            cur = node[rows]
            go_left = X[rows, self.feature[cur]] <= self.threshold[cur]
            node[rows] = np.where(go_left, self.left[cur], self.right[cur])
            active[rows] = self.feature[node[rows]] != LEAF
        return node

    def predict(self, X) -> np.ndarray:
        return self.value[self.apply(X)]


class _Builder:
    def __init__(self, X, r, max_depth, min_leaf):
        self.X, self.r = X, r
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.feature, self.threshold = [], []
        self.left, self.right, self.value = [], [], []

    def _new_node(self):
        for lst, init in ((self.feature, LEAF), (self.threshold, 0.0),
                          (self.left, LEAF), (self.right, LEAF), (self.value, 0.0)):
            lst.append(init)
        return len(self.feature) - 1

    def grow(self, idx, depth):
        node = self._new_node()
        rs = self.r[idx]
        self.value[node] = float(rs.mean())
        remaining = None if self.max_depth is None else self.max_depth - depth
        if remaining == 0 or len(idx) < 2 * self.min_leaf or rs.max() == rs.min():
            return node

        if self.max_depth == 2 and depth == 0:
            f, t, _ = _splits.best_two_level(self.X, self.r, idx, self.min_leaf)
        else:
            f, t, _ = _splits.best_split(self.X, self.r, idx, self.min_leaf)
        if f < 0:
            return node

        go_left = self.X[idx, f] <= t
        self.feature[node] = int(f)
        self.threshold[node] = float(t)
        self.left[node] = self.grow(idx[go_left], depth + 1)
        self.right[node] = self.grow(idx[~go_left], depth + 1)
        return node

    def tree(self):
        return RegressionTree(
            feature=np.array(self.feature, dtype=np.int64),
            threshold=np.array(self.threshold, dtype=float),
            left=np.array(self.left, dtype=np.int64),
            right=np.array(self.right, dtype=np.int64),
            value=np.array(self.value, dtype=float),
            n_features=self.X.shape[1],
        )


def fit_tree(features, residuals, cfg: TrainConfig = TrainConfig()) -> RegressionTree:
    """Fit a least-squares regression tree to ``residuals``.

    Splits are chosen greedily by lowest one-step SSE, except that a tree
    with ``max_depth == 2`` picks its root by exhaustive lookahead over both
    levels, so stumps and depth-2 trees are exact SSE minimisers over all
    trees of that depth with midpoint thresholds. A node stops
    splitting when it is pure, would violate ``min_samples_leaf``, or has no
    two distinct values on any feature. Leaves hold the mean residual.
    """
    X = np.ascontiguousarray(features, dtype=float)
    r = np.ascontiguousarray(residuals, dtype=float)
    if X.ndim != 2:
        raise DimensionMismatch(f"features must be 2-D, got shape {X.shape}")
    if len(X) != len(r):
        raise LengthMismatch(f"{len(X)} feature rows vs {len(r)} residuals")
    if len(r) == 0:
        raise EmptyTargets("no samples")
    b = _Builder(X, r, cfg.max_depth, cfg.min_samples_leaf)
    b.grow(np.arange(len(r)), 0)
    return b.tree()


def init_constant(targets) -> float:
    """Constant minimising squared error, i.e. the mean."""
    y = np.asarray(targets, dtype=float)
    if y.size == 0:
        raise EmptyTargets("no targets")
    return float(y.mean())


def squared_loss(y, f):
    return (np.asarray(y, dtype=float) - np.asarray(f, dtype=float)) ** 2


def negative_gradient(targets, predictions) -> np.ndarray:
    """Working residuals ``y - f`` (half the negative gradient of squared loss)."""
    y = np.asarray(targets, dtype=float)
    f = np.asarray(predictions, dtype=float)
    if y.shape != f.shape:
        raise LengthMismatch(f"{y.shape} targets vs {f.shape} predictions")
    return y - f


def line_search(targets, prev_predictions, tree_outputs) -> float:
    """Step ``beta`` minimising ``sum (y - f - beta*h)^2``; 0 when ``h`` is all zero."""
    r = negative_gradient(targets, prev_predictions)
    h = np.asarray(tree_outputs, dtype=float)
    if h.shape != r.shape:
        raise LengthMismatch(f"{h.shape} tree outputs vs {r.shape} residuals")
    hh = float(h @ h)
    if hh == 0.0:
        return 0.0
    return float(r @ h) / hh


@dataclass
class GbdtModel:
    f0: float
    n_features: int
    shrinkage: float = 0.1
    stages: list[tuple[RegressionTree, float]] = field(default_factory=list)
    loss_history: list[float] = field(default_factory=list)

    def stage_step(self, tree, beta, X):
        return (self.shrinkage * beta) * tree.predict(X)

    def staged_predict(self, X):
        """Yield predictions after 0, 1, ..., M stages."""
        X = self._check(X)
        out = np.full(len(X), self.f0)
        yield out.copy()
        for tree, beta in self.stages:
            out = out + self.stage_step(tree, beta, X)
            yield out.copy()

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X = self._check(X)
        out = np.full(len(X), self.f0)
        for tree, beta in self.stages:
            out = out + self.stage_step(tree, beta, X)
        return out[0] if single else out

    def _check(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise DimensionMismatch(
                f"expected {self.n_features} features, got shape {X.shape}")
        return X


def train(features, targets, cfg: TrainConfig = TrainConfig(), eval_set=None) -> GbdtModel:
    """Boost ``cfg.iterations`` trees on ``(features, targets)``.

    ``loss_history[m]`` is the summed squared training loss after ``m``
    stages. When ``cfg.patience`` is set and ``eval_set=(X_val, y_val)`` is
    given, training stops once the validation loss has not improved for
    ``patience`` stages and the model is cut back to its best stage.
    """
    X = np.ascontiguousarray(features, dtype=float)
    y = np.asarray(targets, dtype=float)
    if X.ndim != 2:
        raise DimensionMismatch(f"features must be 2-D, got shape {X.shape}")
    if len(X) != len(y):
        raise LengthMismatch(f"{len(X)} feature rows vs {len(y)} targets")

    model = GbdtModel(init_constant(y), X.shape[1], cfg.shrinkage)
    F = np.full(len(y), model.f0)
    model.loss_history.append(float(squared_loss(y, F).sum()))

    use_val = cfg.patience is not None and eval_set is not None
    if use_val:
        X_val = model._check(eval_set[0])
        y_val = np.asarray(eval_set[1], dtype=float)
        F_val = np.full(len(y_val), model.f0)
        best_val, best_m = float(squared_loss(y_val, F_val).sum()), 0

    for m in range(1, cfg.iterations + 1):
        r = negative_gradient(y, F)
        tree = fit_tree(X, r, cfg)
        h = tree.predict(X)
        beta = line_search(y, F, h)
        model.stages.append((tree, beta))
        F = F + model.stage_step(tree, beta, X)
        model.loss_history.append(float(squared_loss(y, F).sum()))

        if use_val:
            F_val = F_val + model.stage_step(tree, beta, X_val)
            val = float(squared_loss(y_val, F_val).sum())
            if val < best_val:
                best_val, best_m = val, m
            elif m - best_m >= cfg.patience:
                logger.info("early stop at stage %d, keeping %d", m, best_m)
                del model.stages[best_m:]
                del model.loss_history[best_m + 1:]
                break
    return model


def predict(model: GbdtModel, x) -> float | np.ndarray:
    return model.predict(x)
