"""Pure-Python/numpy SGD loop; the fallback when the compiled kernel is missing.

Mirrors ``_sgd_fast.pyx`` statement for statement. Results agree with the
compiled kernel up to floating-point summation order inside dot products.
"""

from __future__ import annotations

import math

import numpy as np

from offlang.linear.losses import (
    HINGE, L1, L2, LOG, LOG_SOFT, MODIFIED_HUBER, _softplus, sigmoid,
)

_MIN_SCALE = 1e-9


def _point_loss(code: int, f: float, y: float) -> float:
    if code == LOG_SOFT:
        return _softplus(f) - y * f
    z = y * f
    if code == MODIFIED_HUBER:
        if z >= 1.0:
            return 0.0
        if z >= -1.0:
            return (1.0 - z) * (1.0 - z)
        return -4.0 * z
    if code == HINGE:
        return 1.0 - z if z < 1.0 else 0.0
    return _softplus(-z)


def _point_grad(code: int, f: float, y: float) -> float:
    """d loss / d f."""
    if code == LOG_SOFT:
        return sigmoid(f) - y
    z = y * f
    if code == MODIFIED_HUBER:
        if z >= 1.0:
            return 0.0
        if z >= -1.0:
            return -2.0 * (1.0 - z) * y
        return -4.0 * y
    if code == HINGE:
        return -y if z < 1.0 else 0.0
    if z > 0:
        e = math.exp(-z)
        return -e / (1.0 + e) * y
    return -1.0 / (1.0 + math.exp(z)) * y


def _objective(indptr, indices, data, y, sw, w, bias, loss, penalty, alpha):
    total = 0.0
    for i in range(y.shape[0]):
        lo, hi = indptr[i], indptr[i + 1]
        f = float(np.dot(w[indices[lo:hi]], data[lo:hi])) + bias
        total += sw[i] * _point_loss(loss, f, y[i])
    total /= float(sw.sum())
    if penalty == L2:
        total += 0.5 * alpha * float(np.dot(w, w))
    elif penalty == L1:
        total += alpha * float(np.abs(w).sum())
    return total


def run_sgd(indptr, indices, data, y, sw, w, bias, loss, penalty, alpha, eta0, orders):
    """Run ``len(orders)`` passes of per-example SGD, updating ``w`` in place.

    Returns the final bias and the objective before training and after
    every pass.
    """
    n_passes = orders.shape[0]
    objectives = np.empty(n_passes + 1)
    objectives[0] = _objective(indptr, indices, data, y, sw, w, bias, loss, penalty, alpha)
    # L2 keeps w = scale * v so the shrink step is O(1).
    v = w
    scale = 1.0
    u = 0.0
    q = np.zeros_like(w) if penalty == L1 else None
    k = 0
    for t in range(n_passes):
        for i in orders[t]:
            lo, hi = indptr[i], indptr[i + 1]
            idx = indices[lo:hi]
            x = data[lo:hi]
            eta = eta0 / (1.0 + alpha * eta0 * k)
            f = scale * float(np.dot(v[idx], x)) + bias
            g = _point_grad(loss, f, y[i]) * sw[i]
            if penalty == L2:
                shrink = 1.0 - eta * alpha
                if shrink <= 0.0:
                    v[:] = 0.0
                    scale = 1.0
                else:
                    scale *= shrink
                    if scale < _MIN_SCALE:
                        v *= scale
                        scale = 1.0
            if g != 0.0:
                v[idx] -= (eta * g / scale) * x
                bias -= eta * g
            if penalty == L1:
                u += eta * alpha
                for j in idx.tolist():
                    before = v[j]
                    if before > 0.0:
                        v[j] = max(0.0, before - (u + q[j]))
                    elif before < 0.0:
                        v[j] = min(0.0, before + (u - q[j]))
                    q[j] += v[j] - before
            k += 1
        if scale != 1.0:
            v *= scale
            scale = 1.0
        objectives[t + 1] = _objective(indptr, indices, data, y, sw, w, bias, loss, penalty, alpha)
    return bias, objectives
