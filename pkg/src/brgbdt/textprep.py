"""Text cleaning and tokenization.

Raw customer-service records are reduced to token sequences in three steps:
noise substrings (order numbers, phone numbers, ...) are stripped by
:func:`clean`, protected multi-word terms are pulled out by longest match,
and the remaining text is split on a token pattern with stopwords dropped
(:func:`tokenize`).
"""
from __future__ import annotations

import json
import logging
import re
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ConfigError, MalformedLine

logger = logging.getLogger(__name__)

DEFAULT_TOKEN_PATTERN = r"[^\W_]+"

_WS = re.compile(r"\s+")


@dataclass(frozen=True)
class RawRecord:
    id: str
    text: str
    noise_fields: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Document:
    id: str
    tokens: tuple[str, ...]

    @property
    def word_set(self) -> frozenset[str]:
        return frozenset(self.tokens)

    def __len__(self):
        return len(self.tokens)


def _normalize_ws(text: str) -> str:
    return _WS.sub(" ", text).strip()


def _is_cjk(ch: str) -> bool:
    name = unicodedata.name(ch, "")
    return name.startswith(("CJK", "HIRAGANA", "KATAKANA", "HANGUL"))


def _is_latin(ch: str) -> bool:
    return unicodedata.name(ch, "").startswith("LATIN")


def lower_latin(text: str) -> str:
    """Lowercase Latin-script letters only; other scripts pass through."""
    if text.isascii():
        return text.lower()
    return "".join(ch.lower() if _is_latin(ch) else ch for ch in text)


@dataclass(frozen=True)
class TokenizerConfig:
    """Tokenizer settings.

    ``protected_phrases`` are kept as single tokens even when they contain
    spaces; ``stopwords`` are dropped. The two sets must not overlap.
    Casing of phrases and stopwords follows ``lowercase``.
    """

    protected_phrases: frozenset[str] = frozenset()
    stopwords: frozenset[str] = frozenset()
    lowercase: bool = True
    token_pattern: str = DEFAULT_TOKEN_PATTERN

    def __post_init__(self):
        norm = lower_latin if self.lowercase else (lambda s: s)
        phrases = frozenset(norm(_normalize_ws(p)) for p in self.protected_phrases)
        phrases = frozenset(p for p in phrases if p)
        stops = frozenset(norm(s.strip()) for s in self.stopwords)
        stops = frozenset(s for s in stops if s)
        object.__setattr__(self, "protected_phrases", phrases)
        object.__setattr__(self, "stopwords", stops)
        overlap = phrases & stops
        if overlap:
            raise ConfigError(
                f"protected phrases may not be stopwords: {sorted(overlap)}")
        try:
            re.compile(self.token_pattern)
        except re.error as exc:
            raise ConfigError(f"bad token_pattern {self.token_pattern!r}: {exc}")


def clean(record: RawRecord, drop_fields: Iterable[str] = (),
          patterns: Iterable[str | re.Pattern] = ()) -> str:
    """Strip noise substrings from ``record.text``.

    Removes the literal values of the named ``record.noise_fields`` and every
    match of ``patterns``. Removal is repeated until nothing changes, so the
    result is idempotent even when deleting one match splices together a new
    one. Whitespace runs are collapsed to a single space.
    """
    literals = []
    for name in drop_fields:
        value = record.noise_fields.get(name)
        if value:
            literals.append(re.escape(value))
    compiled = [re.compile(p) if isinstance(p, str) else p for p in patterns]
    compiled += [re.compile(lit) for lit in literals]

    text = _normalize_ws(record.text)
    while True:
        prev = text
        for pat in compiled:
            text = pat.sub(" ", text)
        text = _normalize_ws(text)
        if text == prev:
            return text


def _joins(a: str, b: str) -> bool:
    # two adjacent characters belong to the same word
    return a.isalnum() and b.isalnum() and not (_is_cjk(a) or _is_cjk(b))


def _phrase_spans(text: str, phrases: frozenset[str]) -> list[tuple[int, int]]:
    """Left-to-right, longest-first phrase matches that respect word edges."""
    if not phrases:
        return []
    by_first: dict[str, list[str]] = {}
    for p in sorted(phrases, key=lambda p: (-len(p), p)):
        by_first.setdefault(p[0], []).append(p)

    spans = []
    i, n = 0, len(text)
    while i < n:
        hit = None
        if i == 0 or not _joins(text[i - 1], text[i]):
            for p in by_first.get(text[i], ()):
                j = i + len(p)
                if text.startswith(p, i) and (j == n or not _joins(text[j - 1], text[j])):
                    hit = j
                    break
        if hit is None:
            i += 1
        else:
            spans.append((i, hit))
            i = hit
    return spans


def tokenize(text: str, cfg: TokenizerConfig, doc_id: str = "") -> Document:
    """Split ``text`` into a :class:`Document`.

    >>> cfg = TokenizerConfig(frozenset({"database issues"}), frozenset({"the"}))
    >>> tokenize("The database  issues", cfg).tokens
    ('database issues',)
    """
    text = _normalize_ws(text)
    if cfg.lowercase:
        text = lower_latin(text)
    pattern = re.compile(cfg.token_pattern)

    tokens: list[str] = []
    pos = 0
    for start, end in _phrase_spans(text, cfg.protected_phrases):
        tokens.extend(pattern.findall(text[pos:start]))
        tokens.append(text[start:end])
        pos = end
    tokens.extend(pattern.findall(text[pos:]))

    return Document(doc_id, tuple(t for t in tokens if t and t not in cfg.stopwords))


def preprocess(records: Iterable[RawRecord], cfg: TokenizerConfig,
               drop_fields: Iterable[str] = (),
               patterns: Iterable[str] = ()) -> list[Document]:
    """Clean and tokenize a corpus, dropping documents left with no tokens."""
    drop_fields = tuple(drop_fields)
    patterns = [re.compile(p) for p in patterns]
    docs = []
    for rec in records:
        doc = tokenize(clean(rec, drop_fields, patterns), cfg, rec.id)
        if doc.tokens:
            docs.append(doc)
        else:
            logger.warning("document %r is empty after preprocessing; dropped", rec.id)
    return docs


def iter_jsonl(path) -> Iterator[tuple[int, dict]]:
    """Yield ``(line_no, object)`` from a JSON-lines file, skipping blanks."""
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLine(line_no, exc.msg) from None
            if not isinstance(obj, dict):
                raise MalformedLine(line_no, "expected a JSON object")
            yield line_no, obj


def read_corpus(path, noise_keys: Sequence[str] = ()) -> list[RawRecord]:
    """Read ``{"id", "text"}`` records; keys listed in ``noise_keys`` become noise fields."""
    records = []
    seen = set()
    for line_no, obj in iter_jsonl(path):
        rid, text = obj.get("id"), obj.get("text")
        if not isinstance(rid, str) or not rid:
            raise MalformedLine(line_no, "missing or empty 'id'")
        if not isinstance(text, str):
            raise MalformedLine(line_no, "missing 'text'")
        if rid in seen:
            raise MalformedLine(line_no, f"duplicate id {rid!r}")
        seen.add(rid)
        noise = {k: str(obj[k]) for k in noise_keys if k in obj}
        records.append(RawRecord(rid, text, noise))
    return records


def load_wordlist(path) -> frozenset[str]:
    """One entry per line; blank lines and lines starting with ``#`` are skipped."""
    entries = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                entries.add(line)
    return frozenset(entries)
