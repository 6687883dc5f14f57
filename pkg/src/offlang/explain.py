"""Local surrogate explanations for black-box text classifiers.

Words of the input are dropped at random, the black box scores every variant,
and a logistic model on word-presence features is fit to those scores with
samples weighted by ``exp(-(1 - kept_fraction)^2 / kernel_width)``. The
surrogate's coefficients are the term weights; its fidelity is reported as
the mean KL divergence from the black box and a weighted agreement rate.
"""

from __future__ import annotations

import html
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from offlang import linear
from offlang.errors import DataError
from offlang.linear import Hyperparams, LinearModel

Blackbox = Callable[[str], Sequence[float]]

PROB_EPS = 1e-6
SURROGATE_PARAMS = Hyperparams(loss="log", penalty="l2", alpha=1e-5, max_iter=100,
                               random_state=0, eta0=0.5, shuffle=True)


def mask_samples(tokens: Sequence[str], n_samples: int, drop_prob: float,
                 seed: int) -> list[tuple[list[str], float]]:
    """``n_samples`` masked copies of ``tokens``; sample 0 is the original."""
    if not tokens:
        raise DataError("cannot perturb an empty token list")
    if n_samples < 1:
        raise DataError("n_samples must be >= 1")
    if not 0.0 < drop_prob < 1.0:
        raise DataError("drop_prob must lie strictly between 0 and 1")
    tokens = list(tokens)
    rng = np.random.default_rng(seed)
    keep = rng.random((n_samples - 1, len(tokens))) >= drop_prob
    out = [(tokens, 1.0)]
    for row in keep:
        out.append(([t for t, k in zip(tokens, row) if k], float(row.sum()) / len(tokens)))
    return out


def _check_proba(p, text: str) -> tuple[float, float]:
    try:
        p_not, p_off = (float(v) for v in p)
    except (TypeError, ValueError):
        raise DataError(f"black box returned {p!r} for {text!r}; expected (p_NOT, p_OFF)") from None
    if not (math.isfinite(p_not) and math.isfinite(p_off)) or p_not < 0 or p_off < 0 \
            or abs(p_not + p_off - 1.0) > 1e-6:
        raise DataError(f"black box returned invalid probabilities ({p_not}, {p_off}) for {text!r}")
    return p_not, p_off


def kl_divergence(p_off, q_off) -> np.ndarray:
    """Per-sample KL(p || q) of two-class distributions given P(OFF)."""
    p = np.clip(np.asarray(p_off, dtype=np.float64), PROB_EPS, 1 - PROB_EPS)
    q = np.clip(np.asarray(q_off, dtype=np.float64), PROB_EPS, 1 - PROB_EPS)
    return p * np.log(p / q) + (1 - p) * np.log((1 - p) / (1 - q))


@dataclass
class Explanation:
    term_weights: list  # (token, weight), |weight| descending
    bias: float
    mean_kl_divergence: float
    surrogate_score: float
    n_samples: int
    seed: int
    text: str = ""
    vocabulary: list = field(default_factory=list, repr=False)
    surrogate: Optional[LinearModel] = field(default=None, repr=False)
    samples: list = field(default_factory=list, repr=False)
    sample_weights: Optional[np.ndarray] = field(default=None, repr=False)

    def _presence(self, token_lists) -> sp.csr_matrix:
        col = {t: j for j, t in enumerate(self.vocabulary)}
        rows, cols = [], []
        for i, toks in enumerate(token_lists):
            for j in sorted({col[t] for t in toks if t in col}):
                rows.append(i)
                cols.append(j)
        return sp.csr_matrix((np.ones(len(rows)), (rows, cols)),
                             shape=(len(token_lists), len(self.vocabulary)))

    def surrogate_proba(self, text: str) -> tuple[float, float]:
        """The surrogate as a black box: ``(p_NOT, p_OFF)`` for any text."""
        p = linear.predict_proba(self.surrogate, self._presence([text.split()]))[0]
        return float(p[0]), float(p[1])

    def fidelity(self, blackbox: Blackbox) -> tuple[float, float]:
        """(mean KL, weighted agreement) of the surrogate against ``blackbox``
        on this explanation's own perturbation samples."""
        texts = [" ".join(toks) for toks, _ in self.samples]
        bb = np.array([_check_proba(blackbox(t), t)[1] for t in texts])
        return _fidelity(bb, self._surrogate_off([t for t, _ in self.samples]), self.sample_weights)

    def _surrogate_off(self, token_lists) -> np.ndarray:
        return linear.predict_proba(self.surrogate, self._presence(token_lists))[:, 1]

    def top_terms(self, n: int = 10) -> list:
        return self.term_weights[:n]

    def render_table(self) -> str:
        lines = [
            f"text: {self.text}",
            f"mean_KL_divergence={self.mean_kl_divergence:.6f}  score={self.surrogate_score:.4f}  "
            f"n_samples={self.n_samples}  seed={self.seed}",
            f"{'rank':>4}  {'weight':>10}  term",
        ]
        for i, (tok, w) in enumerate(self.term_weights, start=1):
            lines.append(f"{i:>4}  {w:+10.4f}  {tok}")
        lines.append(f"{'':>4}  {self.bias:+10.4f}  <BIAS>")
        return "\n".join(lines) + "\n"

    def render_html(self) -> str:
        """Standalone page; each word is shaded by |weight| (green NOT, red OFF)."""
        weights = dict(self.term_weights)
        top = max((abs(w) for w in weights.values()), default=0.0) or 1.0
        spans = []
        for tok in self.text.split():
            w = weights.get(tok, 0.0)
            alpha = min(abs(w) / top, 1.0)
            rgb = "220, 40, 40" if w > 0 else "40, 160, 60"
            spans.append(
                f'<span style="background-color: rgba({rgb}, {alpha:.3f})" '
                f'title="{w:+.4f}">{html.escape(tok)}</span>'
            )
        rows = "\n".join(
            f"<tr><td>{w:+.4f}</td><td>{html.escape(t)}</td></tr>" for t, w in self.term_weights
        )
        return (
            "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>explanation</title></head>\n"
            "<body>\n"
            f"<p>mean_KL_divergence={self.mean_kl_divergence:.6f}, score={self.surrogate_score:.4f}, "
            f"n_samples={self.n_samples}, seed={self.seed}</p>\n"
            f"<p style=\"font-size: 1.4em\">{' '.join(spans)}</p>\n"
            "<table><tr><th>weight</th><th>term</th></tr>\n"
            f"{rows}\n<tr><td>{self.bias:+.4f}</td><td>&lt;BIAS&gt;</td></tr>\n</table>\n"
            "</body></html>\n"
        )


def _fidelity(bb_off, sur_off, weights) -> tuple[float, float]:
    mean_kl = float(np.mean(kl_divergence(bb_off, sur_off)))
    agree = (np.asarray(bb_off) > 0.5) == (np.asarray(sur_off) > 0.5)
    score = float(np.sum(weights * agree) / np.sum(weights))
    return max(mean_kl, 0.0), score


def explain_text(blackbox: Blackbox, text: str, n_samples: int = 500, drop_prob: float = 0.3,
                 seed: int = 0, kernel_width: float = 0.25, sequential: bool = True,
                 surrogate_params: Hyperparams = SURROGATE_PARAMS) -> Explanation:
    """Explain ``blackbox``'s decision on ``text``.

    ``blackbox`` maps a string to ``(p_NOT, p_OFF)``. With
    ``sequential=False`` it is queried from a thread pool and must be
    thread-safe.
    """
    tokens = text.split()
    if not tokens:
        raise DataError("cannot explain an empty text")
    samples = mask_samples(tokens, n_samples, drop_prob, seed)
    texts = [" ".join(toks) for toks, _ in samples]
    if sequential:
        raw = [blackbox(t) for t in texts]
    else:
        with ThreadPoolExecutor() as pool:
            raw = list(pool.map(blackbox, texts))
    bb_off = np.array([_check_proba(p, t)[1] for p, t in zip(raw, texts)])
    kept = np.array([kf for _, kf in samples])
    weights = np.exp(-((1.0 - kept) ** 2) / kernel_width)

    vocabulary = list(dict.fromkeys(tokens))
    expl = Explanation([], 0.0, 0.0, 0.0, n_samples, seed, text=text, vocabulary=vocabulary,
                       samples=samples, sample_weights=weights)
    X = expl._presence([toks for toks, _ in samples])
    params = Hyperparams(**{**surrogate_params.to_dict(), "random_state": seed})
    expl.surrogate = linear.fit_soft(X, bb_off, params, sample_weight=weights)

    coef = expl.surrogate.weights
    order = sorted(range(len(vocabulary)), key=lambda j: -abs(coef[j]))
    expl.term_weights = [(vocabulary[j], float(coef[j])) for j in order]
    expl.bias = expl.surrogate.bias
    expl.mean_kl_divergence, expl.surrogate_score = _fidelity(
        bb_off, expl._surrogate_off([toks for toks, _ in samples]), weights)
    return expl
