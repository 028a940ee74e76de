"""Command-line pipeline: mine-labels, split, train, predict, eval.

Exit codes: 0 success, 2 configuration error, 3 input/output error,
4 empty corpus after cleaning, 5 degenerate labels under ``--strict``.
Diagnostics go to stderr; data goes to files only.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from . import config as config_mod
from . import labelmine, mlknn, multilabel, serialize
from .errors import BrgbdtError, ConfigError, EmptyCorpus, KTooLarge, MalformedLine
from .evaluation import score, split
from .textprep import (RawRecord, TokenizerConfig, clean, iter_jsonl, load_wordlist,
                       preprocess, read_corpus, tokenize)
from .vectorize import embed, load_embeddings

logger = logging.getLogger("brgbdt")

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_EMPTY, EXIT_STRICT = 0, 2, 3, 4, 5
ALGORITHMS = ("br-gbdt", "br-lr", "ml-knn")


class StrictFailure(Exception):
    pass


def _dump_jsonl(rows) -> str:
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows)


def tokenizer_from(cfg) -> TokenizerConfig:
    t = cfg.tokenizer
    return TokenizerConfig(
        protected_phrases=load_wordlist(t.protected_phrases) if t.protected_phrases else frozenset(),
        stopwords=load_wordlist(t.stopwords) if t.stopwords else frozenset(),
        lowercase=t.lowercase,
        token_pattern=t.token_pattern,
    )


def cmd_mine_labels(corpus_path, cfg, out_path, universe_path=None) -> int:
    tok = tokenizer_from(cfg)
    records = read_corpus(corpus_path, cfg.tokenizer.noise_fields)
    docs = preprocess(records, tok, cfg.tokenizer.noise_fields, cfg.tokenizer.noise_patterns)
    if not docs:
        raise EmptyCorpus("no documents left after cleaning")
    stats = labelmine.compute_stats(docs)
    mined = labelmine.mine_labels(docs, stats, cfg.labels.delta, cfg.labels.mode)

    text_of = {r.id: r.text for r in records}
    rows = [{"id": d.id, "text": text_of[d.id], "labels": mined.per_doc[d.id]} for d in docs]
    serialize.write_atomic(out_path, _dump_jsonl(rows))
    universe_path = universe_path or default_universe_path(out_path)
    serialize.write_atomic(universe_path, "".join(lab + "\n" for lab in mined.universe))

    hist = Counter(len(v) for v in mined.per_doc.values())
    print(f"{len(docs)} documents, {len(mined.universe)} labels", file=sys.stderr)
    for size in sorted(hist):
        print(f"  {size} label(s): {hist[size]} documents", file=sys.stderr)
    return EXIT_OK


def default_universe_path(out_path) -> str:
    p = Path(out_path)
    return str(p.with_name(p.stem + ".universe.txt"))


class _TextFeaturizer:
    """Clean, tokenize and embed raw text rows on demand."""

    def __init__(self, cfg):
        self.cfg = cfg
        self._tok = None
        self._table = None

    def __call__(self, rid, obj):
        if self._table is None:
            if not self.cfg.embedding.path:
                raise ConfigError("rows carry text but embedding.path is not configured")
            self._tok = tokenizer_from(self.cfg)
            self._table = load_embeddings(self.cfg.embedding.path, self.cfg.embedding.dim)
        t = self.cfg.tokenizer
        noise = {k: str(obj[k]) for k in t.noise_fields if k in obj}
        text = clean(RawRecord(rid, obj["text"], noise), t.noise_fields, t.noise_patterns)
        values, oov = embed(tokenize(text, self._tok, rid), self._table)
        if oov:
            logger.warning("document %r has no in-vocabulary tokens; zero vector used", rid)
        return values


def read_dataset(path, cfg, labeled=True):
    """Rows of ``{"id", "features" | "text", "labels"?}`` -> ``(ids, X, label sets)``."""
    featurize = _TextFeaturizer(cfg)
    ids, rows, labels = [], [], []
    for line_no, obj in iter_jsonl(path):
        rid = obj.get("id")
        if not isinstance(rid, str) or not rid:
            raise MalformedLine(line_no, "missing or empty 'id'")
        if "features" in obj:
            vec = np.asarray(obj["features"], dtype=float)
            if vec.ndim != 1 or not np.all(np.isfinite(vec)):
                raise MalformedLine(line_no, "'features' must be a list of finite numbers")
        elif isinstance(obj.get("text"), str):
            vec = featurize(rid, obj)
        else:
            raise MalformedLine(line_no, "row needs 'features' or 'text'")
        if rows and vec.shape != rows[0].shape:
            raise MalformedLine(line_no, f"feature length {vec.size}, expected {rows[0].size}")
        if labeled:
            labs = obj.get("labels")
            if not isinstance(labs, list) or not all(isinstance(x, str) for x in labs):
                raise MalformedLine(line_no, "'labels' must be a list of strings")
            labels.append(frozenset(labs))
        ids.append(rid)
        rows.append(vec)
    if not rows:
        raise EmptyCorpus(f"{path}: no rows")
    return ids, np.vstack(rows), labels


def cmd_split(data_path, cfg, train_out, test_out) -> int:
    rows = [obj for _, obj in iter_jsonl(data_path)]
    train, test = split(rows, cfg.split)
    serialize.write_atomic(train_out, _dump_jsonl(train))
    serialize.write_atomic(test_out, _dump_jsonl(test))
    print(f"{len(train)} train / {len(test)} test", file=sys.stderr)
    return EXIT_OK


def cmd_train(data_path, cfg, model_out, algorithm="br-gbdt", strict=False,
              loss_log=None) -> int:
    ids, X, label_sets = read_dataset(data_path, cfg)
    T = [labelmine.LabeledInstance(x, labs, rid) for rid, x, labs in zip(ids, X, label_sets)]
    universe = multilabel.universe_of(T)
    if not universe:
        raise EmptyCorpus("training data carries no labels")

    Y = labelmine.indicator_matrix(label_sets, universe)
    degenerate = [lab for j, lab in enumerate(universe) if Y[:, j].all() or not Y[:, j].any()]
    if degenerate and strict:
        raise StrictFailure(f"degenerate labels: {degenerate}")

    n_jobs = cfg.run.n_jobs
    if algorithm == "br-gbdt":
        model = multilabel.train_br_gbdt(T, cfg.gbdt, universe, n_jobs=n_jobs)
        log_rows = []
        for lab, scorer in zip(universe, model.scorers):
            hist = scorer.loss_history
            if hist:
                logger.info("label %r: loss %.6g -> %.6g over %d stages",
                            lab, hist[0], hist[-1], len(hist) - 1)
            log_rows += [{"label": lab, "iteration": m, "loss": v} for m, v in enumerate(hist)]
        if loss_log:
            serialize.write_atomic(loss_log, _dump_jsonl(log_rows))
    elif algorithm == "br-lr":
        model = multilabel.train_br_lr(T, cfg.lr, universe, n_jobs=n_jobs)
    elif algorithm == "ml-knn":
        try:
            model = mlknn.train_mlknn(T, cfg.mlknn.k, cfg.mlknn.smoothing, universe)
        except KTooLarge as exc:
            raise ConfigError(str(exc)) from None
    else:
        raise ConfigError(f"unknown algorithm {algorithm!r}")
    serialize.save_model(model, model_out)
    print(f"trained {algorithm} on {len(T)} instances, {len(universe)} labels",
          file=sys.stderr)
    return EXIT_OK


def predict_dataset(model, X):
    """``(label lists, score matrix)`` for any trained multi-label model."""
    if isinstance(model, mlknn.MlknnModel):
        return mlknn.predict_many(model, X)
    return multilabel.predict_many(model, X)


def cmd_predict(model_path, data_path, cfg, out_path) -> int:
    model = serialize.load_model(model_path)
    ids, X, _ = read_dataset(data_path, cfg, labeled=False)
    labels, S = predict_dataset(model, X)
    rows = [{"id": rid, "labels": labs,
             "scores": {lab: float(v) for lab, v in zip(model.universe, s)}}
            for rid, labs, s in zip(ids, labels, S)]
    serialize.write_atomic(out_path, _dump_jsonl(rows))
    return EXIT_OK


def cmd_eval(model_path, data_path, cfg, report_out, table_out=None) -> int:
    model = serialize.load_model(model_path)
    ids, X, truth = read_dataset(data_path, cfg)
    known = set(model.universe)
    unseen = sorted(set().union(*truth) - known)
    if unseen:
        logger.warning("%d test labels never seen in training are ignored: %s",
                       len(unseen), unseen[:10])
        truth = [t & known for t in truth]
    predicted, _ = predict_dataset(model, X)
    report = score(truth, predicted, model.universe)
    body = report.to_dict()
    if not cfg.metrics.per_label:
        body.pop("per_label")
    serialize.write_atomic(report_out, json.dumps(body, indent=2) + "\n")
    table = report.render()
    if table_out:
        serialize.write_atomic(table_out, table + "\n")
    print(table, file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI configuration file")
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override one configuration value (repeatable)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="brgbdt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mine-labels", parents=[common], help="clean a corpus and mine label sets")
    p.add_argument("corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--universe", help="label universe file (default: <out stem>.universe.txt)")

    p = sub.add_parser("split", parents=[common], help="seeded train/test split")
    p.add_argument("data")
    p.add_argument("--train-out", required=True)
    p.add_argument("--test-out", required=True)

    p = sub.add_parser("train", parents=[common], help="train a multi-label model")
    p.add_argument("data")
    p.add_argument("--model-out", required=True)
    p.add_argument("--algorithm", choices=ALGORITHMS, default="br-gbdt")
    p.add_argument("--strict", action="store_true",
                   help="fail (exit 5) on labels with no positive or no negative example")
    p.add_argument("--loss-log", help="JSON-lines per-iteration training loss (br-gbdt)")

    p = sub.add_parser("predict", parents=[common], help="predict label sets")
    p.add_argument("model")
    p.add_argument("data")
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", parents=[common], help="score predictions against labels")
    p.add_argument("model")
    p.add_argument("data")
    p.add_argument("--report", required=True)
    p.add_argument("--table", help="also write the text table here")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr, force=True)
    try:
        cfg = config_mod.load(args.config, args.set)
        if args.command == "mine-labels":
            return cmd_mine_labels(args.corpus, cfg, args.out, args.universe)
        if args.command == "split":
            return cmd_split(args.data, cfg, args.train_out, args.test_out)
        if args.command == "train":
            return cmd_train(args.data, cfg, args.model_out, args.algorithm,
                             args.strict, args.loss_log)
        if args.command == "predict":
            return cmd_predict(args.model, args.data, cfg, args.out)
        return cmd_eval(args.model, args.data, cfg, args.report, args.table)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EmptyCorpus as exc:
        print(f"empty corpus: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except StrictFailure as exc:
        print(f"strict: {exc}", file=sys.stderr)
        return EXIT_STRICT
    except (OSError, ValueError, BrgbdtError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
