"""Character n-grams inside word boundaries, weighted by TF-IDF.

Conventions:

* every token ``t`` is padded to ``" " + t + " "`` and n-grams never cross
  tokens; a padded token shorter than ``n_min`` is emitted whole, once;
* ``idf = ln((1 + N) / (1 + df)) + 1`` with ``N`` the number of fitted
  documents;
* document vectors are raw counts times idf, scaled to unit L2 norm.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from offlang.errors import ConfigError, DataError


@dataclass(frozen=True, eq=False)
class SparseVector:
    """Sorted ``(index, value)`` pairs of a vector with ``dim`` columns."""

    dim: int
    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=np.float64)
        if idx.shape != val.shape or idx.ndim != 1:
            raise ValueError("indices and values must be 1-D arrays of equal length")
        if idx.size:
            if np.any(np.diff(idx) <= 0):
                raise ValueError("indices must be strictly increasing")
            if idx[0] < 0 or idx[-1] >= self.dim:
                raise ValueError(f"index out of range for dim {self.dim}")
            if not np.all(np.isfinite(val)):
                raise ValueError("values must be finite")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @classmethod
    def zeros(cls, dim: int) -> "SparseVector":
        return cls(dim, np.empty(0, np.int64), np.empty(0, np.float64))

    @classmethod
    def from_dense(cls, dense) -> "SparseVector":
        dense = np.asarray(dense, dtype=np.float64).ravel()
        idx = np.flatnonzero(dense)
        return cls(dense.size, idx, dense[idx])

    @classmethod
    def from_csr_row(cls, row) -> "SparseVector":
        row = sp.csr_matrix(row)
        row.sort_indices()
        keep = row.data != 0
        return cls(row.shape[1], row.indices[keep], row.data[keep])

    @property
    def entries(self) -> list[tuple[int, float]]:
        return list(zip(self.indices.tolist(), self.values.tolist()))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out

    def to_csr(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.values, self.indices, np.array([0, self.indices.size])), shape=(1, self.dim)
        )

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.values, self.values)))

    def __eq__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        return (
            self.dim == other.dim
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )


def stack(vectors: Sequence[SparseVector]) -> sp.csr_matrix:
    """Rows of a CSR matrix from sparse vectors of a common dimension."""
    if not vectors:
        raise DataError("cannot stack an empty list of vectors")
    dim = vectors[0].dim
    if any(v.dim != dim for v in vectors):
        raise DataError("vectors have inconsistent dimensions")
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([v.indices.size for v in vectors])
    indices = np.concatenate([v.indices for v in vectors]) if indptr[-1] else np.empty(0, np.int64)
    data = np.concatenate([v.values for v in vectors]) if indptr[-1] else np.empty(0)
    return sp.csr_matrix((data, indices, indptr), shape=(len(vectors), dim))


def _check_range(n_min: int, n_max: int) -> None:
    if not (1 <= n_min <= n_max):
        raise ConfigError(f"invalid n-gram range ({n_min}, {n_max}); need 1 <= n_min <= n_max")


def char_wb_ngrams(tokens: Iterable[str], n_min: int, n_max: int) -> Counter:
    _check_range(n_min, n_max)
    grams: Counter = Counter()
    for tok in tokens:
        padded = f" {tok} "
        size = len(padded)
        if size < n_min:
            grams[padded] += 1
            continue
        for n in range(n_min, min(n_max, size) + 1):
            for i in range(size - n + 1):
                grams[padded[i:i + n]] += 1
    return grams


@dataclass(frozen=True, eq=False)
class Vocabulary:
    ngrams: tuple[str, ...]
    idf: np.ndarray
    n_min: int
    n_max: int
    doc_count: int
    ngram_to_col: dict = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "ngrams", tuple(self.ngrams))
        object.__setattr__(self, "idf", np.asarray(self.idf, dtype=np.float64))
        if len(self.ngrams) != self.idf.size:
            raise ValueError("one idf weight per n-gram required")
        object.__setattr__(self, "ngram_to_col", {g: i for i, g in enumerate(self.ngrams)})

    def __len__(self) -> int:
        return len(self.ngrams)

    def __eq__(self, other):
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return (
            self.ngrams == other.ngrams
            and np.array_equal(self.idf, other.idf)
            and (self.n_min, self.n_max, self.doc_count) == (other.n_min, other.n_max, other.doc_count)
        )

    def to_dict(self) -> dict:
        return {
            "n_min": self.n_min,
            "n_max": self.n_max,
            "doc_count": self.doc_count,
            "ngrams": list(self.ngrams),
            "idf": self.idf.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Vocabulary":
        return cls(tuple(d["ngrams"]), np.array(d["idf"], dtype=np.float64),
                   int(d["n_min"]), int(d["n_max"]), int(d["doc_count"]))


def fit_vocabulary(corpus: Sequence[Sequence[str]], n_min: int = 3, n_max: int = 6,
                   min_df: int = 1) -> Vocabulary:
    _check_range(n_min, n_max)
    if len(corpus) == 0:
        raise DataError("cannot fit a vocabulary on an empty corpus")
    df: Counter = Counter()
    for tokens in corpus:
        df.update(char_wb_ngrams(tokens, n_min, n_max).keys())
    kept = sorted(g for g, c in df.items() if c >= min_df)
    if not kept:
        raise DataError("empty vocabulary: every n-gram was filtered out (min_df too high?)")
    n = len(corpus)
    dfs = np.array([df[g] for g in kept], dtype=np.float64)
    idf = np.log((1.0 + n) / (1.0 + dfs)) + 1.0
    return Vocabulary(tuple(kept), idf, n_min, n_max, n)


def _weighted_row(tokens, vocab: Vocabulary):
    lookup = vocab.ngram_to_col
    cols = {}
    for gram, count in char_wb_ngrams(tokens, vocab.n_min, vocab.n_max).items():
        col = lookup.get(gram)
        if col is not None:
            cols[col] = count
    if not cols:
        return np.empty(0, np.int64), np.empty(0)
    idx = np.fromiter(sorted(cols), dtype=np.int64, count=len(cols))
    val = np.array([cols[i] for i in idx.tolist()], dtype=np.float64) * vocab.idf[idx]
    val /= np.sqrt(np.dot(val, val))
    return idx, val


def tfidf_transform(tokens: Sequence[str], vocab: Vocabulary) -> SparseVector:
    idx, val = _weighted_row(tokens, vocab)
    return SparseVector(len(vocab), idx, val)


def tfidf_matrix(corpus: Sequence[Sequence[str]], vocab: Vocabulary) -> sp.csr_matrix:
    """Row-wise :func:`tfidf_transform` of a whole corpus."""
    rows = [_weighted_row(tokens, vocab) for tokens in corpus]
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([r[0].size for r in rows])
    if indptr[-1]:
        indices = np.concatenate([r[0] for r in rows])
        data = np.concatenate([r[1] for r in rows])
    else:
        indices, data = np.empty(0, np.int64), np.empty(0)
    return sp.csr_matrix((data, indices, indptr), shape=(len(rows), len(vocab)))
