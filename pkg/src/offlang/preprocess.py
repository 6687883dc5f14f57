"""Tweet cleaning and stemming.

A "clean tweet" is the lower-cased, whitespace-tokenized text with configured
stopwords (and optionally the ``@USER``/``URL`` placeholders) removed.
Punctuation stays attached to its token.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from offlang.errors import DataError
from offlang.porter import porter_stem

__all__ = ["CleanConfig", "CleanText", "clean", "load_stopwords", "porter_stem", "stem_text"]

PLACEHOLDERS = frozenset({"@user", "url"})
_ASCII_WORD = re.compile(r"[a-z]+")


@dataclass(frozen=True)
class CleanConfig:
    stopwords: frozenset = frozenset()
    drop_placeholders: bool = False

    def __post_init__(self):
        object.__setattr__(self, "stopwords", frozenset(w.lower() for w in self.stopwords))


@dataclass(frozen=True)
class CleanText:
    tokens: tuple[str, ...]

    @property
    def joined(self) -> str:
        return " ".join(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)


def clean(text: str, cfg: CleanConfig = CleanConfig()) -> CleanText:
    tokens = []
    for tok in text.lower().split():
        if tok in cfg.stopwords:
            continue
        if cfg.drop_placeholders and tok in PLACEHOLDERS:
            continue
        tokens.append(tok)
    return CleanText(tuple(tokens))


def stem_text(ct: CleanText) -> CleanText:
    """Porter-stem pure ASCII-letter tokens; leave everything else as is."""
    return CleanText(tuple(
        porter_stem(t) if _ASCII_WORD.fullmatch(t) else t for t in ct.tokens
    ))


def load_stopwords(path) -> frozenset:
    """One word per line; blank lines and ``#`` comments are ignored."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read stopword file {path}: {exc}") from exc
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)
