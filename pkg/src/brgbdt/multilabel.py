"""Binary Relevance multi-label learners.

A multi-label problem over labels ``l_1 .. l_q`` is split into ``q``
independent binary problems with targets +1 (label present) and -1
(absent). Each binary problem gets its own real-valued scorer, and an
instance receives every label whose score is positive; when no score is
positive it receives the single top-scoring label instead.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import gbdt
from .errors import DimensionMismatch, NonFiniteLoss, UnknownLabel
from .labelmine import LabeledInstance

logger = logging.getLogger(__name__)

__all__ = [
    "LabeledInstance", "BrModel", "LinearScorer", "LrConfig",
    "universe_of", "feature_matrix", "binarize", "labels_from_scores",
    "train_br_gbdt", "train_br_lr", "predict_scores", "predict_labels",
]


def universe_of(T: Sequence[LabeledInstance]) -> list[str]:
    """Sorted union of all label sets in ``T``."""
    return sorted(set().union(*(inst.labels for inst in T))) if T else []


def _resolve_universe(T, universe):
    if universe is None:
        return universe_of(T)
    universe = list(universe)
    extra = set().union(*(inst.labels for inst in T)) - set(universe)
    if extra:
        raise UnknownLabel(f"labels outside the universe: {sorted(extra)}")
    return universe


def feature_matrix(T: Sequence[LabeledInstance]) -> np.ndarray:
    X = np.array([np.asarray(inst.features, dtype=float) for inst in T])
    if X.ndim != 2:
        raise DimensionMismatch("instances do not share one feature dimension")
    return X


def binarize(T: Sequence[LabeledInstance], label: str, universe=None):
    """Pairs ``(features, +1 or -1)`` for membership of ``label``, in order of ``T``."""
    if universe is None:
        universe = universe_of(T)
    if label not in universe:
        raise UnknownLabel(f"label {label!r} not in universe")
    return [(inst.features, 1.0 if label in inst.labels else -1.0) for inst in T]


def _targets(T, label):
    return np.array([1.0 if label in inst.labels else -1.0 for inst in T])


def labels_from_scores(scores, universe: Sequence[str]) -> list[str]:
    """Labels with positive score, or the argmax label if none is positive.

    Ties in the fallback go to the lowest label index, so the result is
    never empty.
    """
    scores = np.asarray(scores, dtype=float)
    if scores.shape != (len(universe),):
        raise DimensionMismatch(f"{scores.shape} scores for {len(universe)} labels")
    picked = [universe[j] for j in np.flatnonzero(scores > 0)]
    if not picked:
        picked = [universe[int(np.argmax(scores))]]
    return picked


@dataclass
class LinearScorer:
    weights: np.ndarray
    bias: float

    def predict(self, X):
        return np.asarray(X, dtype=float) @ self.weights + self.bias


@dataclass(frozen=True)
class LrConfig:
    epochs: int = 500
    step_size: float = 0.5
    l2: float = 1e-4

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be positive, got {self.epochs}")
        if self.step_size <= 0:
            raise ValueError(f"step_size must be positive, got {self.step_size}")
        if self.l2 < 0:
            raise ValueError(f"l2 must be non-negative, got {self.l2}")


@dataclass
class BrModel:
    """One scorer per label; ``scorers[j]`` scores ``universe[j]``."""

    universe: list[str]
    scorers: list
    kind: str
    n_features: int

    def decision_function(self, X) -> np.ndarray:
        """``(n, q)`` score matrix."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise DimensionMismatch(
                f"expected {self.n_features} features, got shape {X.shape}")
        return np.column_stack([s.predict(X) for s in self.scorers])


def _degenerate_sign(y, label):
    if np.all(y > 0) or np.all(y < 0):
        sign = float(y[0])
        logger.warning("label %r has no %s examples; using constant score %+g",
                       label, "negative" if sign > 0 else "positive", sign)
        return sign
    return None


def _fit_labels(fit_one, universe, n_jobs):
    if n_jobs == 1:
        return [fit_one(lab) for lab in universe]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(fit_one, universe))


def train_br_gbdt(T: Sequence[LabeledInstance], cfg: gbdt.TrainConfig = gbdt.TrainConfig(),
                  universe: Sequence[str] | None = None, n_jobs: int = 1) -> BrModel:
    """One boosted ensemble per label.

    A label with no positive (or no negative) training instance gets a
    zero-stage model that always scores -1 (or +1).
    """
    if not T:
        raise ValueError("empty training set")
    universe = _resolve_universe(T, universe)
    X = feature_matrix(T)

    def fit_one(label):
        y = _targets(T, label)
        sign = _degenerate_sign(y, label)
        if sign is not None:
            return gbdt.GbdtModel(sign, X.shape[1], cfg.shrinkage)
        return gbdt.train(X, y, cfg)

    return BrModel(universe, _fit_labels(fit_one, universe, n_jobs), "br-gbdt", X.shape[1])


def logistic_objective(w, b, X, y, l2):
    """Mean logistic loss with +-1 targets plus ``l2/2 * |w|^2``, and its gradient."""
    z = X @ w + b
    margin = y * z
    loss = np.logaddexp(0.0, -margin).mean() + 0.5 * l2 * (w @ w)
    # d/dz log(1 + exp(-y z)) = -y * sigmoid(-y z)
    coef = -y * np.exp(-np.logaddexp(0.0, margin)) / len(y)
    return loss, X.T @ coef + l2 * w, coef.sum()


def fit_logistic(X, y, cfg: LrConfig = LrConfig()) -> LinearScorer:
    """Full-batch gradient descent; the bias is not penalised."""
    w = np.zeros(X.shape[1])
    b = 0.0
    for epoch in range(cfg.epochs):
        loss, gw, gb = logistic_objective(w, b, X, y, cfg.l2)
        if not np.isfinite(loss):
            raise NonFiniteLoss(f"loss became {loss} at epoch {epoch}; lower step_size")
        w = w - cfg.step_size * gw
        b = b - cfg.step_size * gb
    loss = logistic_objective(w, b, X, y, cfg.l2)[0]
    if not np.isfinite(loss) or not np.all(np.isfinite(w)):
        raise NonFiniteLoss(f"loss became {loss}; lower step_size")
    return LinearScorer(w, float(b))


def train_br_lr(T: Sequence[LabeledInstance], cfg: LrConfig = LrConfig(),
                universe: Sequence[str] | None = None, n_jobs: int = 1) -> BrModel:
    if not T:
        raise ValueError("empty training set")
    universe = _resolve_universe(T, universe)
    X = feature_matrix(T)

    def fit_one(label):
        y = _targets(T, label)
        sign = _degenerate_sign(y, label)
        if sign is not None:
            return LinearScorer(np.zeros(X.shape[1]), sign)
        return fit_logistic(X, y, cfg)

    return BrModel(universe, _fit_labels(fit_one, universe, n_jobs), "br-lr", X.shape[1])


def predict_scores(model: BrModel, x) -> np.ndarray:
    return model.decision_function(x)[0]


def predict_labels(model: BrModel, x) -> list[str]:
    return labels_from_scores(predict_scores(model, x), model.universe)


def predict_many(model: BrModel, X) -> tuple[list[list[str]], np.ndarray]:
    """Label lists and score matrix for every row of ``X``."""
    S = model.decision_function(X)
    return [labels_from_scores(row, model.universe) for row in S], S
