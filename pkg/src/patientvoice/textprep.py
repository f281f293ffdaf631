"""Tokenization, stop-word removal and stemming for the similarity pipeline.

The classifier consumes raw lowercase tokens only (``tokenize``); stop-word
removal and stemming (``normalize``) apply to the TF-IDF path alone.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence


@dataclass(frozen=True)
class PrepConfig:
    """Knobs for the text preparation pipeline.

    stopword_path: file overriding the bundled English stop list.
    stem: apply Porter stemming after stop-word removal.
    min_token_length: tokens shorter than this are dropped after stripping.
    keep_trailing_plus: keep a trailing '+' glued to an alphanumeric, so
        markers like "her2+" survive tokenization.
    """

    stopword_path: Optional[str] = None
    stem: bool = True
    min_token_length: int = 1
    keep_trailing_plus: bool = False

    def __post_init__(self) -> None:
        if self.min_token_length < 1:
            raise ValueError("min_token_length must be >= 1")


@dataclass(frozen=True)
class TermSequence:
    """Ordered lowercase terms of one document after normalization."""

    terms: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[str]:
        return iter(self.terms)


def _strip_edges(raw: str, keep_trailing_plus: bool) -> str:
    start, end = 0, len(raw)
    while start < end and not raw[start].isalnum():
        start += 1
    while end > start and not raw[end - 1].isalnum():
        if (
            keep_trailing_plus
            and raw[end - 1] == "+"
            and end - 1 > start
            and raw[end - 2].isalnum()
        ):
            break
        end -= 1
    return raw[start:end]


def tokenize(text: str, config: Optional[PrepConfig] = None) -> list[str]:
    """Whitespace-split, strip edge punctuation, lowercase, length-filter.

    Intra-token characters (apostrophes, hyphens, digits) are preserved;
    only leading and trailing non-alphanumerics are removed.
    """
    cfg = config or _DEFAULT_CONFIG
    tokens = []
    for raw in text.split():
        token = _strip_edges(raw, cfg.keep_trailing_plus).lower()
        if len(token) >= cfg.min_token_length and token:
            tokens.append(token)
    return tokens


def load_stopwords(path: Optional[str] = None) -> frozenset[str]:
    """Stop words from ``path``, or the bundled default list."""
    if path is None:
        return _default_stopwords()
    with open(path, "r", encoding="utf-8") as handle:
        return _parse_stopwords(handle.read())


@lru_cache(maxsize=1)
def _default_stopwords() -> frozenset[str]:
    text = (
        importlib.resources.files("patientvoice")
        .joinpath("data/stopwords_en.txt")
        .read_text(encoding="utf-8")
    )
    return _parse_stopwords(text)


def _parse_stopwords(text: str) -> frozenset[str]:
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


def normalize(tokens: Sequence[str], config: Optional[PrepConfig] = None) -> TermSequence:
    """Remove stop words, then stem (once). Output never contains a stop word.

    Stemming can itself produce a stop word ("doing" stems to "do"), so the
    stop filter runs again on the stemmed forms to keep the output contract.
    """
    cfg = config or _DEFAULT_CONFIG
    stops = load_stopwords(cfg.stopword_path)
    kept = [t for t in tokens if t.lower() not in stops]
    if cfg.stem:
        from patientvoice import porter

        kept = [porter.stem(t) for t in kept]
        kept = [t for t in kept if t and t not in stops]
    return TermSequence(tuple(kept))


def prepare(text: str, config: Optional[PrepConfig] = None) -> TermSequence:
    """tokenize + normalize in one call."""
    return normalize(tokenize(text, config), config)


_DEFAULT_CONFIG = PrepConfig()
