"""SGD-trained linear classifier with a compiled kernel and a numpy fallback."""

from offlang.linear._backend import BACKEND
from offlang.linear.losses import loss_dz, loss_value
from offlang.linear.model import (
    Hyperparams,
    LinearModel,
    decision_function,
    fit,
    fit_soft,
    predict,
    predict_proba,
    proba_from_margin,
)

__all__ = [
    "BACKEND",
    "Hyperparams",
    "LinearModel",
    "decision_function",
    "fit",
    "fit_soft",
    "loss_dz",
    "loss_value",
    "predict",
    "predict_proba",
    "proba_from_margin",
]
