"""ML-KNN: k-nearest-neighbour counting combined with per-label Bayes rules.

For label ``j`` let ``C_j(x)`` be how many of the ``k`` nearest training
instances of ``x`` carry ``j``. Training estimates, with Laplace smoothing
``s``, the prior ``P(H_j)`` and the likelihoods ``P(C_j = c | H_j)`` and
``P(C_j = c | not H_j)`` by looking at each training instance's own
neighbourhood (itself excluded). Label ``j`` is predicted when
``P(H_j) P(c | H_j) >= P(not H_j) P(c | not H_j)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, KTooLarge
from .labelmine import LabeledInstance, indicator_matrix
from .multilabel import _resolve_universe, feature_matrix


@dataclass
class MlknnModel:
    universe: list[str]
    k: int
    smoothing: float
    prior: np.ndarray        # (q,) P(H_j)
    like_pos: np.ndarray     # (q, k+1) P(C=c | H_j)
    like_neg: np.ndarray     # (q, k+1) P(C=c | not H_j)
    X: np.ndarray
    Y: np.ndarray            # (n, q) bool

    @property
    def n_features(self):
        return self.X.shape[1]

    def neighbors(self, Q, exclude_self=False) -> np.ndarray:
        """Indices of the ``k`` nearest training rows to each row of ``Q``.

        Euclidean distance; equal distances go to the lower training index.
        """
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        if Q.shape[1] != self.n_features:
            raise DimensionMismatch(
                f"expected {self.n_features} features, got shape {Q.shape}")
        return _knn(self.X, Q, self.k, exclude_self)

    def counts(self, Q) -> np.ndarray:
        """``(m, q)`` neighbour label counts for query rows."""
        return self.Y[self.neighbors(Q)].sum(axis=1)

    def joint(self, C):
        """Unnormalised posteriors ``(m, q)`` for label present and absent."""
        rows = np.arange(len(self.universe))
        pos = self.prior * self.like_pos[rows, C]
        neg = (1.0 - self.prior) * self.like_neg[rows, C]
        return pos, neg

    def decision(self, Q):
        """Boolean assignment and posterior-ratio scores for query rows."""
        pos, neg = self.joint(self.counts(Q))
        assign = pos >= neg
        ratio = pos / neg
        # a tie in the fallback goes to the lower label index via argmax
        empty = ~assign.any(axis=1)
        assign[empty, np.argmax(ratio[empty], axis=1)] = True
        return assign, ratio


def _knn(X, Q, k, exclude_self):
    diff = Q[:, None, :] - X[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    if exclude_self:
        np.fill_diagonal(dist, np.inf)
    return np.argsort(dist, axis=1, kind="stable")[:, :k]


def train_mlknn(T: Sequence[LabeledInstance], k: int = 10, s: float = 1.0,
                universe: Sequence[str] | None = None) -> MlknnModel:
    if k < 1:
        raise KTooLarge(f"k must be at least 1, got {k}")
    if k > len(T) - 1:
        raise KTooLarge(f"k={k} needs at least {k + 1} training instances, got {len(T)}")
    if not s > 0:
        raise ValueError(f"smoothing must be positive, got {s}")
    universe = _resolve_universe(T, universe)
    X = feature_matrix(T)
    Y = indicator_matrix([inst.labels for inst in T], universe)
    n, q = Y.shape

    prior = (s + Y.sum(axis=0)) / (2 * s + n)

    nbrs = _knn(X, X, k, exclude_self=True)
    C = Y[nbrs].sum(axis=1)          # (n, q)
    hits_pos = np.zeros((q, k + 1))
    hits_neg = np.zeros((q, k + 1))
    for j in range(q):
        hits_pos[j] = np.bincount(C[Y[:, j], j], minlength=k + 1)
        hits_neg[j] = np.bincount(C[~Y[:, j], j], minlength=k + 1)
    like_pos = (s + hits_pos) / (s * (k + 1) + hits_pos.sum(axis=1, keepdims=True))
    like_neg = (s + hits_neg) / (s * (k + 1) + hits_neg.sum(axis=1, keepdims=True))
    return MlknnModel(universe, k, float(s), prior, like_pos, like_neg, X, Y)


def predict_mlknn(model: MlknnModel, x) -> list[str]:
    assign, _ = model.decision(x)
    return [model.universe[j] for j in np.flatnonzero(assign[0])]


def predict_many(model: MlknnModel, X):
    assign, ratio = model.decision(X)
    labels = [[model.universe[j] for j in np.flatnonzero(row)] for row in assign]
    return labels, ratio
