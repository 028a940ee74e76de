"""Versioned JSON persistence for all model types.

Floats are written with ``repr`` precision, so loading a saved model
reproduces its predictions bit for bit.
"""
from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .gbdt import LEAF, GbdtModel, RegressionTree
from .mlknn import MlknnModel
from .multilabel import BrModel, LinearScorer

FORMAT = "brgbdt-model"
VERSION = 1


def tree_to_dict(tree: RegressionTree, i: int = 0) -> dict:
    if tree.feature[i] == LEAF:
        return {"value": float(tree.value[i])}
    return {
        "feature": int(tree.feature[i]),
        "threshold": float(tree.threshold[i]),
        "left": tree_to_dict(tree, int(tree.left[i])),
        "right": tree_to_dict(tree, int(tree.right[i])),
    }


def tree_from_dict(d: dict, n_features: int) -> RegressionTree:
    cols = {"feature": [], "threshold": [], "left": [], "right": [], "value": []}

    def add(node):
        i = len(cols["feature"])
        for key in cols:
            cols[key].append(LEAF if key in ("feature", "left", "right") else 0.0)
        if "value" in node:
            cols["value"][i] = float(node["value"])
        else:
            cols["feature"][i] = int(node["feature"])
            cols["threshold"][i] = float(node["threshold"])
            cols["left"][i] = add(node["left"])
            cols["right"][i] = add(node["right"])
        return i

    add(d)
    return RegressionTree(
        feature=np.array(cols["feature"], dtype=np.int64),
        threshold=np.array(cols["threshold"], dtype=float),
        left=np.array(cols["left"], dtype=np.int64),
        right=np.array(cols["right"], dtype=np.int64),
        value=np.array(cols["value"], dtype=float),
        n_features=n_features,
    )


def gbdt_to_dict(model: GbdtModel) -> dict:
    return {
        "f0": model.f0,
        "shrinkage": model.shrinkage,
        "n_features": model.n_features,
        "stages": [{"beta": beta, "tree": tree_to_dict(tree)} for tree, beta in model.stages],
        "loss_history": list(model.loss_history),
    }


def gbdt_from_dict(d: dict) -> GbdtModel:
    n = int(d["n_features"])
    stages = [(tree_from_dict(s["tree"], n), float(s["beta"])) for s in d["stages"]]
    return GbdtModel(float(d["f0"]), n, float(d["shrinkage"]), stages,
                     [float(v) for v in d.get("loss_history", [])])


def _linear_to_dict(s: LinearScorer) -> dict:
    return {"weights": [float(w) for w in s.weights], "bias": s.bias}


def _linear_from_dict(d: dict) -> LinearScorer:
    return LinearScorer(np.array(d["weights"], dtype=float), float(d["bias"]))


def to_dict(model) -> dict:
    if isinstance(model, GbdtModel):
        body = {"type": "gbdt", "model": gbdt_to_dict(model)}
    elif isinstance(model, BrModel):
        enc = gbdt_to_dict if model.kind == "br-gbdt" else _linear_to_dict
        body = {
            "type": model.kind,
            "universe": list(model.universe),
            "n_features": model.n_features,
            "scorers": [enc(s) for s in model.scorers],
        }
    elif isinstance(model, MlknnModel):
        body = {
            "type": "ml-knn",
            "universe": list(model.universe),
            "k": model.k,
            "smoothing": model.smoothing,
            "prior": model.prior.tolist(),
            "like_pos": model.like_pos.tolist(),
            "like_neg": model.like_neg.tolist(),
            "X": model.X.tolist(),
            "Y": model.Y.astype(int).tolist(),
        }
    else:
        raise TypeError(f"cannot serialise {type(model).__name__}")
    return {"format": FORMAT, "version": VERSION, **body}


def from_dict(d: dict):
    if d.get("format") != FORMAT:
        raise ValueError(f"not a {FORMAT} document")
    if d.get("version") != VERSION:
        raise ValueError(f"unsupported model version {d.get('version')!r}")
    kind = d.get("type")
    if kind == "gbdt":
        return gbdt_from_dict(d["model"])
    if kind in ("br-gbdt", "br-lr"):
        dec = gbdt_from_dict if kind == "br-gbdt" else _linear_from_dict
        return BrModel(list(d["universe"]), [dec(s) for s in d["scorers"]],
                       kind, int(d["n_features"]))
    if kind == "ml-knn":
        q = len(d["universe"])
        X = np.array(d["X"], dtype=float)
        return MlknnModel(
            universe=list(d["universe"]),
            k=int(d["k"]),
            smoothing=float(d["smoothing"]),
            prior=np.array(d["prior"], dtype=float),
            like_pos=np.array(d["like_pos"], dtype=float),
            like_neg=np.array(d["like_neg"], dtype=float),
            X=X.reshape(len(d["X"]), -1),
            Y=np.array(d["Y"], dtype=bool).reshape(len(X), q),
        )
    raise ValueError(f"unknown model type {kind!r}")


def dumps(model) -> str:
    return json.dumps(to_dict(model), separators=(",", ":"))


def loads(text: str):
    return from_dict(json.loads(text))


def write_atomic(path, text: str) -> None:
    """Write ``text`` to a temp file in the target directory, then rename it over ``path``."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_model(model, path) -> None:
    write_atomic(path, dumps(model) + "\n")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
