"""Pipeline configuration file.

INI format read with :mod:`configparser` (no interpolation, full-line
comments only, so regular expressions may contain ``#``, ``;`` and ``%``).
Every key is optional; unknown sections and keys are errors. Relative paths
resolve against the directory of the config file. Example::

    [tokenizer]
    stopwords = stopwords.txt
    protected_phrases = phrases.txt
    lowercase = true
    token_pattern = [^\\W_]+
    noise_patterns =
        order\\s*#\\s*\\w+
        \\b1\\d{10}\\b
    noise_fields = order_no caller

    [embedding]
    path = vectors.txt
    dim = 400

    [labels]
    delta = 0.5
    mode = total-mass

    [gbdt]
    iterations = 100
    max_depth = 3
    min_samples_leaf = 1
    shrinkage = 0.1
    seed = 0
    patience = none

    [lr]
    epochs = 500
    step_size = 0.5
    l2 = 0.0001

    [mlknn]
    k = 10
    smoothing = 1.0

    [split]
    train_fraction = 0.8
    seed = 0

    [metrics]
    per_label = true

    [run]
    n_jobs = 1
"""
from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields

from .errors import ConfigError
from .evaluation import SplitSpec
from .gbdt import TrainConfig
from .labelmine import MODES, TOTAL_MASS
from .multilabel import LrConfig
from .textprep import DEFAULT_TOKEN_PATTERN


@dataclass(frozen=True)
class TokenizerSection:
    stopwords: str | None = None
    protected_phrases: str | None = None
    lowercase: bool = True
    token_pattern: str = DEFAULT_TOKEN_PATTERN
    noise_patterns: tuple[str, ...] = ()
    noise_fields: tuple[str, ...] = ()


@dataclass(frozen=True)
class EmbeddingSection:
    path: str | None = None
    dim: int = 400


@dataclass(frozen=True)
class LabelsSection:
    delta: float = 0.5
    mode: str = TOTAL_MASS


@dataclass(frozen=True)
class MlknnSection:
    k: int = 10
    smoothing: float = 1.0


@dataclass(frozen=True)
class MetricsSection:
    per_label: bool = True


@dataclass(frozen=True)
class RunSection:
    n_jobs: int = 1


@dataclass(frozen=True)
class PipelineConfig:
    tokenizer: TokenizerSection = field(default_factory=TokenizerSection)
    embedding: EmbeddingSection = field(default_factory=EmbeddingSection)
    labels: LabelsSection = field(default_factory=LabelsSection)
    gbdt: TrainConfig = field(default_factory=TrainConfig)
    lr: LrConfig = field(default_factory=LrConfig)
    mlknn: MlknnSection = field(default_factory=MlknnSection)
    split: SplitSpec = field(default_factory=SplitSpec)
    metrics: MetricsSection = field(default_factory=MetricsSection)
    run: RunSection = field(default_factory=RunSection)


_PATH_KEYS = {("tokenizer", "stopwords"), ("tokenizer", "protected_phrases"),
              ("embedding", "path")}


def _parse_bool(raw):
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_value(section, key, annotation, raw, base_dir):
    raw = raw.strip()
    optional = "None" in annotation
    if optional and raw.lower() in ("", "none"):
        return None
    if annotation.startswith("bool"):
        return _parse_bool(raw)
    if annotation.startswith("int"):
        return int(raw)
    if annotation.startswith("float"):
        return float(raw)
    if annotation.startswith("tuple"):
        if key == "noise_patterns":
            return tuple(line.strip() for line in raw.splitlines() if line.strip())
        return tuple(raw.split())
    if (section, key) in _PATH_KEYS and base_dir and not os.path.isabs(raw):
        return os.path.normpath(os.path.join(base_dir, raw))
    return raw


def build(values: dict[str, dict[str, str]], base_dir: str | None = None) -> PipelineConfig:
    """Validate ``{section: {key: raw string}}`` into a :class:`PipelineConfig`."""
    sections = {f.name: f.default_factory for f in fields(PipelineConfig)}
    built = {}
    for name, factory in sections.items():
        cls = factory
        raw = values.get(name, {})
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, text in raw.items():
            if key not in known:
                raise ConfigError(f"unknown key {name}.{key}")
            try:
                kwargs[key] = _parse_value(name, key, str(known[key].type), text, base_dir)
            except ValueError as exc:
                raise ConfigError(f"bad value for {name}.{key}: {exc}") from None
        try:
            built[name] = cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[{name}] {exc}") from None
    unknown = set(values) - set(sections)
    if unknown:
        raise ConfigError(f"unknown section [{sorted(unknown)[0]}]")
    cfg = PipelineConfig(**built)
    if cfg.labels.mode not in MODES:
        raise ConfigError(f"labels.mode must be one of {MODES}, got {cfg.labels.mode!r}")
    if not cfg.labels.delta > 0 or (cfg.labels.mode == TOTAL_MASS and cfg.labels.delta > 1):
        raise ConfigError(f"labels.delta out of range: {cfg.labels.delta}")
    if cfg.embedding.dim < 1:
        raise ConfigError("embedding.dim must be positive")
    if cfg.mlknn.k < 1 or not cfg.mlknn.smoothing > 0:
        raise ConfigError("mlknn.k must be >= 1 and mlknn.smoothing > 0")
    if cfg.run.n_jobs < 1:
        raise ConfigError("run.n_jobs must be >= 1")
    return cfg


def parse_overrides(items) -> dict[str, dict[str, str]]:
    """``["gbdt.iterations=50", ...]`` -> nested dict."""
    out: dict[str, dict[str, str]] = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        section, dot, name = key.strip().partition(".")
        if not sep or not dot or not section or not name:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        out.setdefault(section, {})[name] = value
    return out


def load(path: str | None = None, overrides=None) -> PipelineConfig:
    """Read ``path`` (or start from defaults) and apply ``section.key=value`` overrides."""
    values: dict[str, dict[str, str]] = {}
    base_dir = None
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None, default_section="\0none")
        parser.optionxform = str
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from None
        values = {s: dict(parser[s]) for s in parser.sections()}
        base_dir = os.path.dirname(os.path.abspath(path))
    for section, kv in parse_overrides(overrides).items():
        values.setdefault(section, {}).update(kv)
    return build(values, base_dir)
