"""Multi-label text classification with binary-relevance boosted trees.

Pipeline: :mod:`~brgbdt.textprep` cleans and tokenizes records,
:mod:`~brgbdt.vectorize` averages pretrained word vectors into document
features, :mod:`~brgbdt.labelmine` mines label sets by TF-IDF,
:mod:`~brgbdt.multilabel` and :mod:`~brgbdt.mlknn` train classifiers and
:mod:`~brgbdt.evaluation` scores them.
"""
from .errors import *  # noqa: F401,F403
from .evaluation import MetricsReport, SplitSpec, score, split
from .gbdt import GbdtModel, RegressionTree, TrainConfig, fit_tree, train
from .labelmine import (CorpusStats, LabeledInstance, MinedLabels, build_training_set,
                        compute_stats, mine_labels, tfidf)
from .mlknn import MlknnModel, predict_mlknn, train_mlknn
from .multilabel import (BrModel, LrConfig, binarize, labels_from_scores, predict_labels,
                         train_br_gbdt, train_br_lr)
from .serialize import load_model, save_model
from .textprep import Document, RawRecord, TokenizerConfig, clean, tokenize
from .vectorize import EmbeddingTable, embed, load_embeddings

__version__ = "0.1.0"
