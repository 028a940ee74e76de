"""Acceptance suite: one test per criterion, each reported as a PASS/FAIL line."""
import math
import time

import numpy as np

from brgbdt import cli, datasets, gbdt, serialize
from brgbdt.evaluation import SplitSpec, score, split
from brgbdt.labelmine import (LabeledInstance, compute_stats, doc_scores, mine_labels,
                              rank_words, tfidf)
from brgbdt.mlknn import predict_many as mlknn_predict, train_mlknn
from brgbdt.multilabel import (BrModel, LinearScorer, feature_matrix, predict_labels,
                               predict_many, train_br_gbdt, train_br_lr)
from brgbdt.textprep import Document

from oracles import mlknn_bruteforce, sign_rule, tree_sse_direct


def test_gradient_matches_finite_differences(criterion):
    with criterion("1 gradient oracle"):
        start = time.perf_counter()
        rng = np.random.default_rng(1)
        y = rng.uniform(-10, 10, 1000)
        f = rng.uniform(-10, 10, 1000)
        eps = 1e-3
        loss = lambda p: (y - p) ** 2  # noqa: E731
        fd = (loss(f + eps) - loss(f - eps)) / (2 * eps)
        # residuals are the negative gradient with the factor 2 absorbed
        np.testing.assert_allclose(gbdt.negative_gradient(y, f), -fd / 2, rtol=1e-6)
        assert time.perf_counter() - start < 1.0


def test_loss_never_increases(criterion):
    with criterion("2 loss descent at shrinkage 1"):
        violations = 0
        cfg = gbdt.TrainConfig(iterations=50, shrinkage=1.0)
        for seed in range(100):
            rng = np.random.default_rng(seed)
            X = rng.normal(size=(200, 10))
            y = X @ rng.normal(size=10) + np.sin(3 * X[:, 0]) + 0.3 * rng.normal(size=200)
            hist = gbdt.train(X, y, cfg).loss_history
            assert len(hist) == 51
            violations += sum(b > a for a, b in zip(hist, hist[1:]))
        assert violations == 0


def test_line_search_matches_grid(criterion):
    with criterion("3 line search vs grid"):
        grid = np.linspace(-10, 10, 10001)
        step = grid[1] - grid[0]
        for seed in range(100):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(5, 60))
            y, f = rng.normal(size=n), rng.normal(size=n)
            h = rng.normal(size=n) * rng.uniform(0.2, 3)
            beta = gbdt.line_search(y, f, h)
            r = y - f
            sse = ((r[None, :] - grid[:, None] * h[None, :]) ** 2).sum(axis=1)
            best = grid[np.argmin(sse)]
            assert -10 <= beta <= 10
            assert abs(beta - best) <= step


def test_tree_matches_enumeration(criterion):
    with criterion("4 tree oracle depth <= 2"):
        mismatches = 0
        for seed in range(200):
            rng = np.random.default_rng(seed)
            n, d, depth = int(rng.integers(2, 13)), int(rng.integers(1, 4)), 1 + seed % 2
            X = rng.integers(0, 5, size=(n, d)).astype(float)
            r = rng.normal(size=n)
            t = gbdt.fit_tree(X, r, gbdt.TrainConfig(max_depth=depth))
            got = float(np.sum((r - t.predict(X)) ** 2))
            mismatches += got != tree_sse_direct(X, r, depth)
        assert mismatches == 0


def test_mlknn_matches_bruteforce(criterion):
    with criterion("5 ML-KNN oracle equivalence"):
        mismatches = 0
        for seed in range(50):
            rng = np.random.default_rng(seed)
            k = 1 + seed % 3
            n, q, d = int(rng.integers(k + 2, 31)), int(rng.integers(1, 5)), int(rng.integers(1, 4))
            X = rng.integers(0, 4, size=(n, d)).astype(float)
            Y = rng.random((n, q)) < 0.4
            names = [f"l{j}" for j in range(q)]
            T = [LabeledInstance(x, frozenset(nm for nm, on in zip(names, y) if on))
                 for x, y in zip(X, Y)]
            m = train_mlknn(T, k=k, s=1.0, universe=names)
            Q = np.vstack([X, rng.integers(0, 4, size=(10, d)).astype(float)])
            got, _ = mlknn_predict(m, Q)
            want = mlknn_bruteforce(X.tolist(), Y.tolist(), k, 1.0, Q.tolist())
            mismatches += sum(set(g) != {names[j] for j in w} for g, w in zip(got, want))
        assert mismatches == 0


def test_prediction_never_empty(criterion):
    with criterion("6 never-empty prediction"):
        rng = np.random.default_rng(6)
        for i in range(10000):
            q = int(rng.integers(1, 7))
            kind = i % 4
            if kind == 0:
                s = rng.normal(size=q)
            elif kind == 1:
                s = -rng.uniform(0.01, 2, size=q)
            elif kind == 2:
                s = -np.full(q, rng.uniform(0, 1))
                s[rng.integers(q)] -= 0.5
            else:
                s = rng.choice([-1.0, -0.5, 0.0, 0.5], size=q)
            universe = [f"l{j}" for j in range(q)]
            model = BrModel(universe, [LinearScorer(np.zeros(1), float(v)) for v in s], "br-lr", 1)
            got = predict_labels(model, [0.0])
            assert got and got == [universe[j] for j in sign_rule(list(s))]


def _corpus(rng):
    vocab = [f"w{i}" for i in range(int(rng.integers(5, 60)))]
    weights = rng.dirichlet(np.full(len(vocab), 0.3))
    docs = []
    for i in range(int(rng.integers(20, 101))):
        n = int(rng.integers(1, 30))
        docs.append(Document(f"d{i}", tuple(rng.choice(vocab, size=n, p=weights))))
    return docs


def test_label_mining_contracts(criterion):
    with criterion("7 tf normalisation and label mining"):
        for seed in range(100):
            rng = np.random.default_rng(seed)
            docs = _corpus(rng)
            stats = compute_stats(docs)
            delta = float(rng.choice([0.3, 0.5, 0.8, 1.0]))
            mined = mine_labels(docs, stats, delta)
            for doc in docs:
                assert math.isclose(sum(tfidf(w, doc, stats).tf for w in doc.word_set), 1.0,
                                    rel_tol=1e-12)
                labels = mined.per_doc[doc.id]
                assert labels
                ranked = rank_words(doc_scores(doc, stats))
                assert labels == [w for w, _ in ranked[:len(labels)]]
                pos = [max(v, 0.0) for _, v in ranked]
                total = sum(pos)
                if total <= 0:
                    assert len(labels) == 1
                    continue
                cum = 0.0
                reached = []
                for v in pos:
                    cum += v
                    reached.append(cum / total >= delta)
                assert reached[len(labels) - 1]
                assert not any(reached[:len(labels) - 1])
            assert mined.universe == sorted(set().union(*map(set, mined.per_doc.values())))


def test_separable_benchmark(criterion):
    with criterion("8 synthetic separable benchmark"):
        start = time.perf_counter()
        T, _ = datasets.make_concepts(n=500, d=8, q=5, seed=0)
        train, test = split(T, SplitSpec(0.8, 0))
        m = train_br_gbdt(train, gbdt.TrainConfig(iterations=100, max_depth=3, shrinkage=0.1))
        pred, _ = predict_many(m, feature_matrix(test))
        f1 = score([t.labels for t in test], pred, m.universe).f1
        print(f"micro-F1 {f1:.4f}")
        assert f1 >= 0.95
        assert time.perf_counter() - start < 30


def test_xor_ordering(criterion):
    with criterion("9 BR-GBDT beats BR+LR on XOR"):
        gaps = []
        for seed in range(10):
            T = datasets.make_xor(n=400, seed=seed)
            train, test = split(T, SplitSpec(0.8, seed))
            X = feature_matrix(test)
            truth = [t.labels for t in test]
            g = train_br_gbdt(train, gbdt.TrainConfig())
            lr = train_br_lr(train)
            fg = score(truth, predict_many(g, X)[0], g.universe).f1
            fl = score(truth, predict_many(lr, X)[0], lr.universe).f1
            gaps.append(fg - fl)
        print(f"mean gap {np.mean(gaps):.4f}")
        assert np.mean(gaps) >= 0.15


def _pipeline(root, write_jsonl, n_jobs):
    records, vectors = datasets.make_text_corpus(n_docs=60, dim=8, seed=3)
    root.mkdir()
    corpus = root / "corpus.jsonl"
    corpus.write_bytes((write_jsonl("src.jsonl", records)).read_bytes())
    with open(root / "vectors.txt", "w", encoding="utf-8") as fh:
        for tok, vec in vectors.items():
            fh.write(tok + " " + " ".join(repr(float(v)) for v in vec) + "\n")
    (root / "cfg.ini").write_text(
        "[tokenizer]\nnoise_patterns = order\\s*#\\s*\\w+\n"
        "[embedding]\npath = vectors.txt\ndim = 8\n"
        "[gbdt]\niterations = 30\n[mlknn]\nk = 5\n[split]\nseed = 11\n"
        f"[run]\nn_jobs = {n_jobs}\n", encoding="utf-8")
    common = ["--config", root / "cfg.ini"]
    steps = [["mine-labels", corpus, "--out", root / "labels.jsonl"],
             ["split", root / "labels.jsonl", "--train-out", root / "train.jsonl",
              "--test-out", root / "test.jsonl"]]
    for algo in cli.ALGORITHMS:
        steps += [["train", root / "train.jsonl", "--algorithm", algo,
                   "--model-out", root / f"{algo}.json", "--loss-log", root / f"{algo}.loss"],
                  ["predict", root / f"{algo}.json", root / "test.jsonl",
                   "--out", root / f"{algo}.pred"],
                  ["eval", root / f"{algo}.json", root / "test.jsonl",
                   "--report", root / f"{algo}.report", "--table", root / f"{algo}.table"]]
    for argv in steps:
        assert cli.main([str(a) for a in argv + common]) == 0
    return {p.name: p.read_bytes() for p in sorted(root.iterdir()) if p.name != "cfg.ini"}


def test_pipeline_deterministic(criterion, tmp_path, write_jsonl):
    with criterion("10 end-to-end determinism"):
        first = _pipeline(tmp_path / "a", write_jsonl, 1)
        second = _pipeline(tmp_path / "b", write_jsonl, 1)
        threaded = _pipeline(tmp_path / "c", write_jsonl, 2)
        assert len(first) >= 17
        assert first == second
        assert first == threaded


def test_roundtrip_bit_exact(criterion, tmp_path):
    with criterion("11 serialization round-trip"):
        T, _ = datasets.make_concepts(n=200, d=6, q=4, seed=9)
        X = feature_matrix(T)
        Q = np.random.default_rng(11).normal(size=(1000, 6)) * 2
        y = X[:, 0] * X[:, 1] + X[:, 2]
        models = {
            "gbdt": gbdt.train(X, y, gbdt.TrainConfig(iterations=40, max_depth=None)),
            "br-gbdt": train_br_gbdt(T, gbdt.TrainConfig(iterations=40)),
            "br-lr": train_br_lr(T),
            "ml-knn": train_mlknn(T, k=7),
        }
        for name, m in models.items():
            path = tmp_path / f"{name}.json"
            serialize.save_model(m, path)
            back = serialize.load_model(path)
            if name == "gbdt":
                np.testing.assert_array_equal(back.predict(Q), m.predict(Q))
            elif name == "ml-knn":
                a, sa = mlknn_predict(m, Q)
                b, sb = mlknn_predict(back, Q)
                assert a == b
                np.testing.assert_array_equal(sa, sb)
            else:
                np.testing.assert_array_equal(back.decision_function(Q), m.decision_function(Q))
                assert predict_many(back, Q)[0] == predict_many(m, Q)[0]
            assert serialize.dumps(back) == serialize.dumps(m)
