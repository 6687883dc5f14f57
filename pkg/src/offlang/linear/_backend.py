"""Pick the SGD kernel at import time.

The compiled extension is preferred; setting ``OFFLANG_PURE_PYTHON=1`` or a
missing build falls back to the numpy implementation.
"""

import os

from offlang.linear import _sgd_py

try:
    if os.environ.get("OFFLANG_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from offlang.linear import _sgd_fast
except ImportError:
    _sgd_fast = None

KERNELS = {"python": _sgd_py.run_sgd}
if _sgd_fast is not None:
    KERNELS["cython"] = _sgd_fast.run_sgd

BACKEND = "cython" if _sgd_fast is not None else "python"


def get_kernel(name=None):
    name = name or BACKEND
    try:
        return KERNELS[name]
    except KeyError:
        raise ValueError(f"SGD backend {name!r} is not available; have {sorted(KERNELS)}") from None
