"""Random over-sampling of the minority class."""

from __future__ import annotations

import numpy as np

from offlang.corpus import ClassLabel, Dataset, LabeledText
from offlang.errors import DataError


def random_oversample(data: Dataset, seed: int) -> Dataset:
    """Append uniformly drawn copies of minority rows until both classes tie.

    Originals keep their order; copies follow with ids suffixed ``#dupN``
    (N counting from 1). A balanced input is returned unchanged.
    """
    if not data.is_labeled:
        raise DataError("over-sampling requires a labeled dataset")
    by_class = {ClassLabel.NOT: [], ClassLabel.OFF: []}
    for i, ex in enumerate(data):
        by_class[ex.label].append(i)
    if not by_class[ClassLabel.NOT] or not by_class[ClassLabel.OFF]:
        raise DataError("over-sampling needs both classes present")
    minority, majority = sorted(by_class.values(), key=len)
    deficit = len(majority) - len(minority)
    if deficit == 0:
        return data
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(minority), size=deficit)
    copies = []
    for n, p in enumerate(picks.tolist(), start=1):
        src = data[minority[p]]
        copies.append(LabeledText(f"{src.id}#dup{n}", src.text, src.label))
    return Dataset(data.examples + tuple(copies), data.name)
