"""Train/test splitting and micro/macro precision, recall and F1."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import LengthMismatch, TooFewInstances, UnknownLabel


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ValueError(f"train_fraction must be in (0, 1), got {self.train_fraction}")


def split(T: Sequence, spec: SplitSpec = SplitSpec()):
    """Seeded shuffle, then the first ``ceil(fraction * n)`` items go to train.

    The train size is clipped to ``[1, n - 1]`` so both parts are nonempty.
    Items keep their relative input order within each part.
    """
    n = len(T)
    if n < 2:
        raise TooFewInstances(f"need at least 2 instances to split, got {n}")
    n_train = math.ceil(round(spec.train_fraction * n, 9))
    n_train = min(max(n_train, 1), n - 1)
    perm = np.random.default_rng(spec.seed).permutation(n)
    train_idx = np.sort(perm[:n_train])
    test_idx = np.sort(perm[n_train:])
    return [T[i] for i in train_idx], [T[i] for i in test_idx]


def _prf(tp, fp, fn):
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


@dataclass
class LabelMetrics:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float


@dataclass
class MetricsReport:
    """Pooled (micro) counts and scores, plus macro averages and per-label rows.

    ``undefined`` names the micro metrics whose denominator was zero and
    were therefore reported as 0.
    """

    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    n_instances: int
    per_label: dict[str, LabelMetrics] = field(default_factory=dict)
    undefined: list[str] = field(default_factory=list)

    def to_dict(self):
        return asdict(self)

    def render(self) -> str:
        """Aligned text table, one row per label then the averages."""
        width = max([len(lab) for lab in self.per_label] + [len("macro")])
        lines = [f"{'label':<{width}}  {'tp':>6} {'fp':>6} {'fn':>6}  "
                 f"{'P':>7} {'R':>7} {'F1':>7}"]
        for lab, m in self.per_label.items():
            lines.append(f"{lab:<{width}}  {m.tp:>6} {m.fp:>6} {m.fn:>6}  "
                         f"{m.precision:>7.4f} {m.recall:>7.4f} {m.f1:>7.4f}")
        lines.append(f"{'micro':<{width}}  {self.tp:>6} {self.fp:>6} {self.fn:>6}  "
                     f"{self.precision:>7.4f} {self.recall:>7.4f} {self.f1:>7.4f}")
        lines.append(f"{'macro':<{width}}  {'':>6} {'':>6} {'':>6}  "
                     f"{self.macro_precision:>7.4f} {self.macro_recall:>7.4f} "
                     f"{self.macro_f1:>7.4f}")
        return "\n".join(lines)


def score(truth, predicted, universe: Sequence[str]) -> MetricsReport:
    """Count TP/FP/FN over all (instance, label) pairs.

    Micro scores come from the pooled counts; macro scores average the
    per-label scores over ``universe``. Zero denominators give 0.
    """
    if len(truth) != len(predicted):
        raise LengthMismatch(f"{len(truth)} truth sets vs {len(predicted)} predictions")
    known = set(universe)
    per = {lab: [0, 0, 0] for lab in universe}
    for t, p in zip(truth, predicted):
        t, p = set(t), set(p)
        bad = (t | p) - known
        if bad:
            raise UnknownLabel(f"labels outside the universe: {sorted(bad)}")
        for lab in t & p:
            per[lab][0] += 1
        for lab in p - t:
            per[lab][1] += 1
        for lab in t - p:
            per[lab][2] += 1

    per_label = {lab: LabelMetrics(tp, fp, fn, *_prf(tp, fp, fn))
                 for lab, (tp, fp, fn) in per.items()}
    tp = sum(m.tp for m in per_label.values())
    fp = sum(m.fp for m in per_label.values())
    fn = sum(m.fn for m in per_label.values())
    p, r, f = _prf(tp, fp, fn)
    undefined = [name for name, denom in
                 (("precision", tp + fp), ("recall", tp + fn), ("f1", p + r)) if not denom]
    q = len(per_label)
    macro = [sum(getattr(m, a) for m in per_label.values()) / q if q else 0.0
             for a in ("precision", "recall", "f1")]
    return MetricsReport(tp, fp, fn, p, r, f, *macro, n_instances=len(truth),
                         per_label=per_label, undefined=undefined)
