"""Independent reference computations used by the tests."""

import math


def brute_ngrams(tokens, n_min, n_max):
    """Every window of every padded token, counted one at a time."""
    counts = {}
    for tok in tokens:
        p = " " + tok + " "
        found = False
        for n in range(n_min, n_max + 1):
            for start in range(0, len(p)):
                piece = p[start:start + n]
                if len(piece) == n:
                    counts[piece] = counts.get(piece, 0) + 1
                    found = True
        if not found:
            counts[p] = counts.get(p, 0) + 1
    return counts


def brute_tfidf(corpus, n_min, n_max):
    """Dense TF-IDF rows keyed by n-gram for every document of ``corpus``."""
    counts = [brute_ngrams(doc, n_min, n_max) for doc in corpus]
    n = len(corpus)
    vocab = sorted({g for c in counts for g in c})
    idf = {}
    for g in vocab:
        df = sum(1 for c in counts if g in c)
        idf[g] = math.log((1 + n) / (1 + df)) + 1
    rows = []
    for c in counts:
        row = {g: c[g] * idf[g] for g in c}
        norm = math.sqrt(sum(v * v for v in row.values()))
        rows.append({g: v / norm for g, v in row.items()} if norm else {})
    return vocab, idf, rows
