"""Regularized linear classifier trained by per-example SGD.

Minimizes ``mean_i loss(y_i * (w.x_i + b)) + alpha * R(w)`` with
``R = ||w||^2 / 2`` (l2) or ``||w||_1`` (l1). The step size at global update
``k`` is ``eta0 / (1 + alpha * eta0 * k)``. Exactly ``max_iter`` passes run;
there is no early stopping.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp

from offlang.corpus import ClassLabel
from offlang.errors import ConfigError, DataError, ProbabilityUnavailableError
from offlang.linear import _backend
from offlang.linear.losses import LOG_SOFT, LOSS_CODES, PENALTY_CODES
from offlang.vectorize import SparseVector, stack

Features = Union[sp.spmatrix, Sequence[SparseVector]]


@dataclass(frozen=True)
class Hyperparams:
    loss: str = "modified_huber"
    penalty: str = "l2"
    alpha: float = 0.001
    max_iter: int = 100
    random_state: int = 69
    eta0: float = 0.01
    shuffle: bool = True

    def __post_init__(self):
        if self.loss not in LOSS_CODES:
            raise ConfigError(f"loss must be one of {sorted(LOSS_CODES)}, got {self.loss!r}")
        if self.penalty not in PENALTY_CODES:
            raise ConfigError(f"penalty must be one of {sorted(PENALTY_CODES)}, got {self.penalty!r}")
        if isinstance(self.max_iter, bool) or int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ConfigError(f"max_iter must be an integer >= 1, got {self.max_iter!r}")
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ConfigError(f"alpha must be finite and >= 0, got {self.alpha!r}")
        if self.penalty != "none" and self.alpha <= 0:
            raise ConfigError(f"alpha must be > 0 with penalty {self.penalty!r}")
        if not (math.isfinite(self.eta0) and self.eta0 > 0):
            raise ConfigError(f"eta0 must be > 0, got {self.eta0!r}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "eta0", float(self.eta0))
        object.__setattr__(self, "max_iter", int(self.max_iter))
        object.__setattr__(self, "random_state", int(self.random_state))
        object.__setattr__(self, "shuffle", bool(self.shuffle))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(eq=False)
class LinearModel:
    weights: np.ndarray
    bias: float
    hyperparams: Hyperparams
    objectives: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.weights.shape[0]

    @property
    def supports_proba(self) -> bool:
        return self.hyperparams.loss != "hinge"


def _as_csr(X: Features) -> sp.csr_matrix:
    if sp.issparse(X):
        X = sp.csr_matrix(X, dtype=np.float64)
    else:
        X = stack(list(X))
    X.sum_duplicates()
    X.sort_indices()
    return X


def _labels_to_signs(y) -> np.ndarray:
    out = np.empty(len(y), dtype=np.float64)
    for i, v in enumerate(y):
        if isinstance(v, ClassLabel):
            out[i] = v.sign
        elif v in (1, -1):
            out[i] = float(v)
        else:
            raise DataError(f"label {v!r} is neither a ClassLabel nor +/-1")
    return out


def _pass_orders(n: int, hp: Hyperparams) -> np.ndarray:
    rng = np.random.default_rng(hp.random_state)
    orders = np.empty((hp.max_iter, n), dtype=np.int64)
    for t in range(hp.max_iter):
        orders[t] = rng.permutation(n) if hp.shuffle else np.arange(n)
    return orders


def _run(X, targets, hp, loss_code, sample_weight, backend) -> LinearModel:
    n, dim = X.shape
    if sample_weight is None:
        sw = np.ones(n)
    else:
        sw = np.asarray(sample_weight, dtype=np.float64)
        if sw.shape != (n,) or np.any(sw < 0) or not np.all(np.isfinite(sw)) or sw.sum() <= 0:
            raise DataError("sample_weight must be finite, non-negative, one per row, not all zero")
    w = np.zeros(dim)
    kernel = _backend.get_kernel(backend)
    bias, objectives = kernel(
        X.indptr.astype(np.int64), X.indices.astype(np.int64), np.ascontiguousarray(X.data),
        np.ascontiguousarray(targets), sw, w, 0.0, loss_code,
        PENALTY_CODES[hp.penalty], hp.alpha, hp.eta0, _pass_orders(n, hp),
    )
    if not (np.all(np.isfinite(w)) and math.isfinite(bias)):
        raise DataError("SGD diverged (non-finite weights); lower eta0")
    return LinearModel(w, float(bias), hp, [float(o) for o in objectives])


def fit(X: Features, y, hp: Hyperparams = Hyperparams(), sample_weight=None,
        backend: Optional[str] = None) -> LinearModel:
    """Train on rows ``X`` with labels ``y`` (ClassLabel or +/-1).

    Weights and bias start at zero. ``backend`` forces ``"cython"`` or
    ``"python"``; by default the compiled kernel is used when built.
    """
    X = _as_csr(X)
    if X.shape[0] == 0 or X.shape[0] != len(y):
        raise DataError(f"need one label per row and at least one row; got {X.shape[0]} rows, {len(y)} labels")
    signs = _labels_to_signs(y)
    if np.all(signs == signs[0]):
        raise DataError("training labels contain a single class")
    return _run(X, signs, hp, LOSS_CODES[hp.loss], sample_weight, backend)


def fit_soft(X: Features, targets, hp: Hyperparams, sample_weight=None,
             backend: Optional[str] = None) -> LinearModel:
    """Logistic regression against probability targets ``P(OFF)`` in [0, 1].

    Minimizes the cross-entropy between the targets and ``sigmoid(w.x + b)``;
    with 0/1 targets this equals the ``log`` loss.
    """
    if hp.loss != "log":
        raise ConfigError("probability targets require loss='log'")
    X = _as_csr(X)
    q = np.asarray(targets, dtype=np.float64)
    if q.shape != (X.shape[0],) or X.shape[0] == 0:
        raise DataError("need one target per row and at least one row")
    if np.any((q < 0) | (q > 1)) or not np.all(np.isfinite(q)):
        raise DataError("probability targets must lie in [0, 1]")
    return _run(X, q, hp, LOG_SOFT, sample_weight, backend)


def decision_function(m: LinearModel, X) -> Union[float, np.ndarray]:
    """``w.x + b`` for one SparseVector (a float) or for each row of a matrix."""
    if isinstance(X, SparseVector):
        if X.dim != m.dim:
            raise DataError(f"vector has dim {X.dim}, model expects {m.dim}")
        return float(np.dot(m.weights[X.indices], X.values)) + m.bias
    X = _as_csr(X)
    if X.shape[1] != m.dim:
        raise DataError(f"matrix has {X.shape[1]} columns, model expects {m.dim}")
    return X @ m.weights + m.bias


def predict(m: LinearModel, X):
    """OFF iff the margin is strictly positive."""
    margin = decision_function(m, X)
    if np.ndim(margin) == 0:
        return ClassLabel.from_sign(margin)
    return [ClassLabel.from_sign(v) for v in margin]


def proba_from_margin(loss: str, margin):
    """``P(OFF)`` implied by ``margin`` under ``loss``."""
    margin = np.asarray(margin, dtype=np.float64)
    if loss == "modified_huber":
        return (np.clip(margin, -1.0, 1.0) + 1.0) / 2.0
    if loss == "log":
        return np.where(margin >= 0, 1.0 / (1.0 + np.exp(-np.abs(margin))),
                        np.exp(-np.abs(margin)) / (1.0 + np.exp(-np.abs(margin))))
    raise ProbabilityUnavailableError("probabilities unavailable for hinge-loss models")


def predict_proba(m: LinearModel, X):
    """``(p_NOT, p_OFF)`` for one vector, or an ``(n, 2)`` array for a matrix."""
    if not m.supports_proba:
        raise ProbabilityUnavailableError("probabilities unavailable for hinge-loss models")
    margin = decision_function(m, X)
    p_off = proba_from_margin(m.hyperparams.loss, margin)
    if np.ndim(p_off) == 0:
        p = float(p_off)
        return (1.0 - p, p)
    return np.column_stack([1.0 - p_off, p_off])
