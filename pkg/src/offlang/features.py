"""Auxiliary feature scorers and the weighted feature union."""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from itertools import groupby
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp

from offlang.errors import ConfigError, DataError
from offlang.preprocess import CleanText
from offlang.vectorize import SparseVector

BLOCK_NAMES = ("tfidf_clean", "tfidf_stemmed", "profanity", "sentiment", "text_stats")
DENSE_DIMS = {"profanity": 3, "sentiment": 1, "text_stats": 4}


@dataclass(frozen=True)
class FeatureBlockSpec:
    name: str
    weight: float

    def __post_init__(self):
        if self.name not in BLOCK_NAMES:
            raise ConfigError(f"unknown feature block {self.name!r}; choose from {BLOCK_NAMES}")
        w = float(self.weight)
        if not math.isfinite(w) or w < 0:
            raise ConfigError(f"block {self.name!r}: weight must be a finite value >= 0, got {self.weight}")
        object.__setattr__(self, "weight", w)

    @property
    def active(self) -> bool:
        return self.weight > 0


def check_block_names(blocks: Sequence[FeatureBlockSpec]) -> None:
    names = [b.name for b in blocks]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise ConfigError(f"duplicate feature blocks: {', '.join(dupes)}")


# --- profanity ---------------------------------------------------------------

@dataclass(frozen=True)
class ProfanityLexicon:
    words: frozenset

    def __post_init__(self):
        object.__setattr__(self, "words", frozenset(w.lower() for w in self.words))

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word) -> bool:
        return word in self.words

    @classmethod
    def load(cls, path) -> "ProfanityLexicon":
        """One word per line; blank lines and ``#`` comments skipped."""
        try:
            text = Path(path).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise DataError(f"cannot read profanity lexicon {path}: {exc}") from exc
        return cls(_parse_word_list(text))

    @classmethod
    def bundled(cls) -> "ProfanityLexicon":
        text = resources.files("offlang.data").joinpath("profanity.txt").read_text(encoding="utf-8")
        return cls(_parse_word_list(text))


def _parse_word_list(text: str) -> frozenset:
    return frozenset(
        line.strip().lower()
        for line in text.splitlines()
        if line.strip() and not line.strip().startswith("#")
    )


def collapse_elongation(token: str, max_run: int = 2) -> str:
    """Shorten every run of one repeated character to at most ``max_run``.

    >>> collapse_elongation("fuuckkkk"), collapse_elongation("fuuckkkk", 1)
    ('fuuckk', 'fuck')
    """
    return "".join(ch * min(len(list(run)), max_run) for ch, run in groupby(token))


def _strip_non_letters(token: str) -> str:
    start, end = 0, len(token)
    while start < end and not token[start].isalpha():
        start += 1
    while end > start and not token[end - 1].isalpha():
        end -= 1
    return token[start:end]


def is_profane(token: str, lex: ProfanityLexicon) -> bool:
    if token in lex:
        return True
    core = _strip_non_letters(token)
    if not core:
        return False
    return (
        core in lex
        or collapse_elongation(core, 2) in lex
        or collapse_elongation(core, 1) in lex
    )


def profanity_features(ct: CleanText, lex: ProfanityLexicon) -> np.ndarray:
    """``[profane_count, any_profane, profane_ratio]`` for one clean tweet."""
    if len(lex) == 0:
        raise ConfigError("profanity block is active but the lexicon is empty")
    count = sum(1 for tok in ct.tokens if is_profane(tok, lex))
    return np.array([count, 1.0 if count else 0.0, count / max(len(ct.tokens), 1)])


# --- sentiment ---------------------------------------------------------------

def load_valence(path) -> dict[str, float]:
    """``word<TAB>value`` lines with value in [-1, 1]."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read valence file {path}: {exc}") from exc
    valence = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DataError(f"{path}:{lineno}: expected 'word<TAB>value'")
        try:
            value = float(parts[1])
        except ValueError:
            raise DataError(f"{path}:{lineno}: {parts[1]!r} is not a number") from None
        if not -1.0 <= value <= 1.0:
            raise DataError(f"{path}:{lineno}: valence {value} outside [-1, 1]")
        valence[parts[0].strip().lower()] = value
    return valence


def sentiment_score(ct: CleanText, valence: Mapping[str, float]) -> np.ndarray:
    hits = [valence[t] for t in ct.tokens if t in valence]
    return np.array([sum(hits) / len(hits) if hits else 0.0])


# --- text statistics ---------------------------------------------------------

def text_stats(raw: str) -> np.ndarray:
    """``[hashtag_count, url_flag, char_length, word_count]`` of the raw tweet."""
    tokens = raw.split()
    hashtags = sum(1 for t in tokens if t.startswith("#"))
    url = any(t.lower() == "url" or t.lower().startswith("http") for t in tokens)
    return np.array([hashtags, 1.0 if url else 0.0, len(raw), len(tokens)], dtype=np.float64)


# --- union -------------------------------------------------------------------

BlockOutput = Union[SparseVector, np.ndarray, None]


def feature_union(blocks: Sequence[tuple[FeatureBlockSpec, BlockOutput]],
                  dims: Optional[Mapping[str, int]] = None) -> SparseVector:
    """Concatenate active blocks in declared order, each scaled by its weight.

    Weight-0 blocks are skipped and may pass ``None`` as output. ``dims``, when
    given, holds the fit-time dimension of each active block.
    """
    check_block_names([spec for spec, _ in blocks])
    offset = 0
    all_idx, all_val = [], []
    for spec, out in blocks:
        if not spec.active:
            continue
        if out is None:
            raise DataError(f"active block {spec.name!r} produced no output")
        vec = out if isinstance(out, SparseVector) else SparseVector.from_dense(out)
        if dims is not None and dims.get(spec.name) != vec.dim:
            raise DataError(
                f"block {spec.name!r}: dimension {vec.dim} does not match fitted {dims.get(spec.name)}"
            )
        all_idx.append(vec.indices + offset)
        all_val.append(vec.values * spec.weight)
        offset += vec.dim
    if not all_idx:
        raise ConfigError("feature union has no active block")
    return SparseVector(offset, np.concatenate(all_idx), np.concatenate(all_val))


def union_matrix(blocks: Sequence[tuple[FeatureBlockSpec, object]]) -> sp.csr_matrix:
    """Batch form of :func:`feature_union`; block outputs are row matrices."""
    parts = []
    for spec, mat in blocks:
        if not spec.active:
            continue
        mat = sp.csr_matrix(mat, dtype=np.float64)
        parts.append(mat * spec.weight)
    if not parts:
        raise ConfigError("feature union has no active block")
    out = sp.hstack(parts, format="csr")
    out.eliminate_zeros()
    out.sort_indices()
    return out
