"""Synthetic multi-label datasets with known axis-aligned structure."""
from __future__ import annotations

import numpy as np

from .labelmine import LabeledInstance


def _instances(X, Y, names):
    return [LabeledInstance(x, frozenset(n for n, on in zip(names, row) if on), f"s{i}")
            for i, (x, row) in enumerate(zip(X, Y))]


def make_concepts(n=500, d=8, q=5, seed=0):
    """Labels defined by random depth-2 axis-aligned rules on uniform features.

    Each label is the AND, OR or XOR of two threshold tests on distinct
    features, or a single threshold test. Points that satisfy no rule are
    redrawn, so every label set is nonempty and every label is exactly its
    rule. Returns ``(instances, rules)``.
    """
    rng = np.random.default_rng(seed)
    kinds = ["and", "or", "xor", "single"]
    rules = []
    for j in range(q):
        a, b = rng.choice(d, size=2, replace=False)
        ta, tb = rng.uniform(-0.4, 0.4, size=2)
        rules.append((kinds[j % len(kinds)], int(a), float(ta), int(b), float(tb)))

    def labels(X):
        cols = []
        for kind, a, ta, b, tb in rules:
            sa, sb = X[:, a] > ta, X[:, b] > tb
            cols.append({"and": sa & sb, "or": sa | sb, "xor": sa ^ sb, "single": sa}[kind])
        return np.column_stack(cols)

    X = np.empty((0, d))
    while len(X) < n:
        cand = rng.uniform(-1.0, 1.0, size=(n, d))
        X = np.vstack([X, cand[labels(cand).any(axis=1)]])
    X = X[:n]
    names = [f"c{j}" for j in range(q)]
    return _instances(X, labels(X), names), rules


def make_xor(n=400, d=4, seed=0, noise=0.0):
    """Three labels: ``lin`` (x2 > 0), ``xor`` (x0 > 0 xor x1 > 0), ``rest`` (neither).

    A fraction ``noise`` of the ``lin`` and ``xor`` bits are flipped before
    ``rest`` is derived, so every label set stays nonempty.
    """
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1.0, 1.0, size=(n, d))
    lin = X[:, 2] > 0
    xor = (X[:, 0] > 0) ^ (X[:, 1] > 0)
    if noise:
        lin ^= rng.random(n) < noise
        xor ^= rng.random(n) < noise
    rest = ~(lin | xor)
    return _instances(X, np.column_stack([lin, xor, rest]), ["lin", "xor", "rest"])


def make_text_corpus(n_docs=60, n_topics=5, words_per_topic=6, dim=16, seed=0):
    """Toy fault-report corpus plus matching word vectors.

    Each document mixes one to three topics; topic keywords cluster around
    a topic centroid in embedding space, and a few filler words appear in
    almost every document. Returns ``(records, vectors)`` where ``records``
    are ``{"id", "text", "order_no"}`` dicts and ``vectors`` maps token to
    a length-``dim`` array.
    """
    rng = np.random.default_rng(seed)
    topics = [[f"t{t}w{w}" for w in range(words_per_topic)] for t in range(n_topics)]
    filler = ["system", "user", "report", "issue"]
    centroids = rng.normal(size=(n_topics, dim))

    vectors = {}
    for t, words in enumerate(topics):
        for w in words:
            vectors[w] = centroids[t] + 0.3 * rng.normal(size=dim)
    for w in filler:
        vectors[w] = 0.1 * rng.normal(size=dim)

    records = []
    for i in range(n_docs):
        k = int(rng.integers(1, 4))
        chosen = rng.choice(n_topics, size=k, replace=False)
        body = []
        for t in chosen:
            body += list(rng.choice(topics[t], size=int(rng.integers(2, 6))))
        body += list(rng.choice(filler, size=3))
        rng.shuffle(body)
        order_no = f"A{rng.integers(10000, 99999)}"
        records.append({"id": f"doc{i:04d}", "text": f"order #{order_no} " + " ".join(body),
                        "order_no": order_no})
    return records, vectors
