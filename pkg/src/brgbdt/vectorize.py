"""Pretrained word vectors and document averaging."""
from __future__ import annotations

import logging
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyFile, MalformedLine
from .textprep import Document

logger = logging.getLogger(__name__)


class EmbeddingTable:
    """Immutable token -> vector lookup of fixed dimension.

    Vectors are stored as rows of one read-only matrix.
    """

    def __init__(self, vectors: dict[str, Sequence[float]], dim: int | None = None):
        if dim is None:
            if not vectors:
                raise ValueError("cannot infer dim from an empty table")
            dim = len(next(iter(vectors.values())))
        if dim <= 0:
            raise ValueError(f"dim must be positive, got {dim}")
        self.dim = int(dim)
        self.index = {tok: i for i, tok in enumerate(vectors)}
        matrix = np.zeros((len(vectors), self.dim))
        for i, vec in enumerate(vectors.values()):
            vec = np.asarray(vec, dtype=float)
            if vec.shape != (self.dim,):
                raise DimensionMismatch(f"vector of shape {vec.shape}, expected ({self.dim},)")
            matrix[i] = vec
        matrix.flags.writeable = False
        self.matrix = matrix

    def __len__(self):
        return len(self.index)

    def __contains__(self, token):
        return token in self.index

    def __getitem__(self, token) -> np.ndarray:
        return self.matrix[self.index[token]]


def load_embeddings(path, expected_dim: int | None = None) -> EmbeddingTable:
    """Read a whitespace-separated text vector file (token then values, no header).

    The dimension comes from the first non-blank line. A token seen twice
    keeps its last vector.
    """
    vectors: dict[str, np.ndarray] = {}
    dim = None
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            token, values = parts[0], parts[1:]
            if dim is None:
                dim = len(values)
                if dim == 0:
                    raise MalformedLine(line_no, "no vector values")
                if expected_dim is not None and dim != expected_dim:
                    raise DimensionMismatch(
                        f"file has dim {dim}, expected {expected_dim}")
            if len(values) != dim:
                raise MalformedLine(line_no, f"{len(values)} values, expected {dim}")
            try:
                vec = np.array([float(v) for v in values])
            except ValueError:
                raise MalformedLine(line_no, "non-numeric value") from None
            if not np.all(np.isfinite(vec)):
                raise MalformedLine(line_no, "non-finite value")
            if token in vectors:
                logger.warning("duplicate token %r on line %d; last one wins", token, line_no)
                del vectors[token]
            vectors[token] = vec
    if dim is None:
        raise EmptyFile(f"{path}: no vectors")
    return EmbeddingTable(vectors, dim)


class Embedded(NamedTuple):
    values: np.ndarray
    oov: bool


def embed(doc: Document, table: EmbeddingTable) -> Embedded:
    """Mean of the table vectors of every token occurrence found in ``table``.

    Repeated tokens count once per occurrence. When no token is known the
    zero vector is returned with ``oov=True``.
    """
    rows = [table.index[t] for t in doc.tokens if t in table.index]
    if not rows:
        return Embedded(np.zeros(table.dim), True)
    return Embedded(table.matrix[rows].mean(axis=0), False)


def embed_corpus(docs: Sequence[Document], table: EmbeddingTable):
    """Stack :func:`embed` over ``docs``; returns ``(X, oov_mask)``."""
    X = np.zeros((len(docs), table.dim))
    oov = np.zeros(len(docs), dtype=bool)
    for i, doc in enumerate(docs):
        X[i], oov[i] = embed(doc, table)
    if oov.any():
        logger.warning("%d of %d documents have no in-vocabulary tokens",
                       int(oov.sum()), len(docs))
    return X, oov


def save_embeddings(table: EmbeddingTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for tok, i in table.index.items():
            fh.write(tok + " " + " ".join(repr(float(v)) for v in table.matrix[i]) + "\n")
