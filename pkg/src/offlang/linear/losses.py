"""Margin losses ``L(z)`` with ``z = y * f(x)`` and their derivatives."""

from __future__ import annotations

import math

HINGE, LOG, MODIFIED_HUBER, LOG_SOFT = 0, 1, 2, 3
LOSS_CODES = {"hinge": HINGE, "log": LOG, "modified_huber": MODIFIED_HUBER}

NONE, L2, L1 = 0, 1, 2
PENALTY_CODES = {"none": NONE, "l2": L2, "l1": L1}


def _softplus(x: float) -> float:
    """ln(1 + e^x) without overflow."""
    if x > 0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


def loss_value(kind: str, z: float) -> float:
    if kind == "modified_huber":
        if z >= 1.0:
            return 0.0
        if z >= -1.0:
            return (1.0 - z) * (1.0 - z)
        return -4.0 * z
    if kind == "hinge":
        return 1.0 - z if z < 1.0 else 0.0
    if kind == "log":
        return _softplus(-z)
    raise ValueError(f"unknown loss {kind!r}")


def loss_dz(kind: str, z: float) -> float:
    if kind == "modified_huber":
        if z >= 1.0:
            return 0.0
        if z >= -1.0:
            return -2.0 * (1.0 - z)
        return -4.0
    if kind == "hinge":
        return -1.0 if z < 1.0 else 0.0
    if kind == "log":
        if z > 0:
            e = math.exp(-z)
            return -e / (1.0 + e)
        return -1.0 / (1.0 + math.exp(z))
    raise ValueError(f"unknown loss {kind!r}")


def sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)
