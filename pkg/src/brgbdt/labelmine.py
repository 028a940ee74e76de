"""TF-IDF label mining.

Each document's label list is the shortest run of its highest-scoring
distinct words whose cumulative TF-IDF mass reaches a threshold. The union
of these lists is the label universe for the classifier.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .errors import EmptyCorpus, InvalidThreshold, MissingVector

TOTAL_MASS = "total-mass"
LITERAL = "literal"
MODES = (TOTAL_MASS, LITERAL)


@dataclass(frozen=True)
class CorpusStats:
    num_docs: int
    doc_freq: Mapping[str, int]
    doc_token_counts: Mapping[str, int]


class TfIdfScore(NamedTuple):
    tf: float
    idf: float
    tfidf: float


@dataclass(frozen=True)
class MinedLabels:
    per_doc: dict[str, list[str]]
    universe: list[str]
    threshold: float = 0.5
    normalizer_mode: str = TOTAL_MASS


@dataclass(frozen=True)
class LabeledInstance:
    features: np.ndarray
    labels: frozenset[str]
    id: str = ""


def compute_stats(corpus) -> CorpusStats:
    """Document frequencies and per-document token totals."""
    if not corpus:
        raise EmptyCorpus("corpus has no documents")
    doc_freq: Counter[str] = Counter()
    counts: dict[str, int] = {}
    for doc in corpus:
        if not doc.tokens:
            raise EmptyCorpus(f"document {doc.id!r} has no tokens")
        if doc.id in counts:
            raise ValueError(f"duplicate document id {doc.id!r}")
        counts[doc.id] = len(doc.tokens)
        doc_freq.update(set(doc.tokens))
    return CorpusStats(len(corpus), dict(doc_freq), counts)


def idf(word: str, stats: CorpusStats) -> float:
    """``log(N / (df + 1))``, natural log. Negative for words in every document."""
    return math.log(stats.num_docs / (stats.doc_freq.get(word, 0) + 1))


def tfidf(word: str, doc, stats: CorpusStats) -> TfIdfScore:
    n = doc.tokens.count(word)
    tf = n / len(doc.tokens) if doc.tokens else 0.0
    w_idf = idf(word, stats)
    return TfIdfScore(tf, w_idf, tf * w_idf)


def doc_scores(doc, stats: CorpusStats) -> dict[str, float]:
    """TF-IDF of every distinct word of ``doc``, in first-occurrence order."""
    total = len(doc.tokens)
    return {w: (n / total) * idf(w, stats) for w, n in Counter(doc.tokens).items()}


def rank_words(scores: Mapping[str, float]) -> list[tuple[str, float]]:
    """Descending score, ties broken by token order."""
    return sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))


def select_labels(scores: Mapping[str, float], delta: float = 0.5,
                  mode: str = TOTAL_MASS) -> list[str]:
    """Shortest top-ranked prefix whose normalised cumulative mass reaches ``delta``.

    ``total-mass`` normalises by the sum of the positive scores and never
    selects a non-positive word; ``literal`` divides the raw cumulative sum
    by the number of distinct words. If the threshold is never reached the
    single best-ranked word is returned.
    """
    _check_threshold(delta, mode)
    ranked = rank_words(scores)
    if not ranked:
        return []
    values = np.array([s for _, s in ranked])

    if mode == TOTAL_MASS:
        positive = np.maximum(values, 0.0)
        cum = np.cumsum(positive)
        total = cum[-1]
        if total > 0:
            frac = cum / total
            k = int(np.argmax(frac >= delta)) + 1
            return [w for w, _ in ranked[:k]]
    else:
        frac = np.cumsum(values) / len(ranked)
        hits = np.flatnonzero(frac >= delta)
        if hits.size:
            return [w for w, _ in ranked[: hits[0] + 1]]
    return [ranked[0][0]]


def _check_threshold(delta, mode):
    if mode not in MODES:
        raise InvalidThreshold(f"unknown normalizer mode {mode!r}")
    if not math.isfinite(delta) or delta <= 0:
        raise InvalidThreshold(f"threshold must be positive, got {delta}")
    if mode == TOTAL_MASS and delta > 1:
        raise InvalidThreshold(f"total-mass threshold must be in (0, 1], got {delta}")


def mine_labels(corpus, stats: CorpusStats, delta: float = 0.5,
                mode: str = TOTAL_MASS) -> MinedLabels:
    _check_threshold(delta, mode)
    per_doc = {doc.id: select_labels(doc_scores(doc, stats), delta, mode)
               for doc in corpus}
    universe = sorted(set().union(*per_doc.values())) if per_doc else []
    return MinedLabels(per_doc, universe, delta, mode)


def build_training_set(corpus, vectors: Mapping[str, Sequence[float]],
                       mined: MinedLabels) -> list[LabeledInstance]:
    """Pair each document's vector with its mined label set, in corpus order."""
    universe = set(mined.universe)
    out = []
    for doc in corpus:
        if doc.id not in vectors:
            raise MissingVector(doc.id)
        labels = frozenset(mined.per_doc[doc.id])
        assert labels <= universe
        out.append(LabeledInstance(np.asarray(vectors[doc.id], dtype=float), labels, doc.id))
    return out


def indicator_matrix(label_sets, universe: Sequence[str]) -> np.ndarray:
    """Boolean ``(n, q)`` matrix with column order given by ``universe``."""
    col = {lab: j for j, lab in enumerate(universe)}
    Y = np.zeros((len(label_sets), len(universe)), dtype=bool)
    for i, labels in enumerate(label_sets):
        for lab in labels:
            Y[i, col[lab]] = True
    return Y
