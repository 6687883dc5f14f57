"""Stratified k-fold cross-validation and exhaustive grid search.

Grid files are JSON objects mapping a parameter name to a non-empty list of
values. Recognized names are the classifier keys (``loss``, ``penalty``,
``alpha``, ``max_iter``, ``eta0``, ``random_state``, ``shuffle``) and
``weight.<block>`` for feature-block weights. Points are enumerated as the
Cartesian product in file order, the last parameter varying fastest.
"""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping, Optional

import numpy as np

from offlang.corpus import ClassLabel, Dataset
from offlang.errors import ConfigError, DataError, GridSearchError
from offlang.pipeline import CLASSIFIER_KEYS, PipelineConfig, Resources, train_pipeline


def stratified_kfold(data: Dataset, k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """``k`` (train, validation) index pairs with class-proportional folds.

    Each class is shuffled with ``seed`` and dealt round-robin across folds,
    continuing where the previous class stopped so fold sizes stay even.
    """
    if k < 2:
        raise ConfigError(f"k must be >= 2, got {k}")
    if not data.is_labeled:
        raise DataError("stratified k-fold needs labeled data")
    rng = np.random.default_rng(seed)
    fold_of = np.empty(len(data), dtype=np.int64)
    start = 0
    for label in (ClassLabel.NOT, ClassLabel.OFF):
        members = np.array([i for i, ex in enumerate(data) if ex.label is label], dtype=np.int64)
        if members.size < k:
            raise DataError(f"class {label.value} has {members.size} examples, fewer than k={k}")
        rng.shuffle(members)
        fold_of[members] = (start + np.arange(members.size)) % k
        start = (start + members.size) % k
    all_idx = np.arange(len(data))
    return [(all_idx[fold_of != f], all_idx[fold_of == f]) for f in range(k)]


@dataclass(frozen=True)
class GridSpec:
    params: dict

    def __post_init__(self):
        if not isinstance(self.params, Mapping) or not self.params:
            raise ConfigError("grid must map at least one parameter to a list of values")
        for key, values in self.params.items():
            if key not in CLASSIFIER_KEYS and not key.startswith("weight."):
                raise ConfigError(f"unknown grid parameter {key!r}")
            if not isinstance(values, list) or not values:
                raise ConfigError(f"grid parameter {key!r} needs a non-empty list of values")
        object.__setattr__(self, "params", dict(self.params))

    def __len__(self) -> int:
        n = 1
        for values in self.params.values():
            n *= len(values)
        return n

    def points(self) -> list[dict]:
        keys = list(self.params)
        return [dict(zip(keys, combo)) for combo in itertools.product(*self.params.values())]

    def to_dict(self) -> dict:
        return {k: list(v) for k, v in self.params.items()}

    @classmethod
    def load(cls, path) -> "GridSpec":
        try:
            return cls(json.loads(Path(path).read_text(encoding="utf-8")))
        except OSError as exc:
            raise ConfigError(f"cannot read grid {path}: {exc.strerror or exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n", encoding="utf-8")


@dataclass
class CVResult:
    points: list
    fold_accuracies: list
    mean_accuracies: list
    best_index: int
    splits: list = field(default_factory=list, repr=False)

    @property
    def best_params(self) -> dict:
        return self.points[self.best_index]

    @property
    def best_mean_accuracy(self) -> float:
        return self.mean_accuracies[self.best_index]

    def to_dict(self) -> dict:
        return {
            "k": len(self.fold_accuracies[0]) if self.fold_accuracies else 0,
            "best_index": self.best_index,
            "best_params": self.best_params,
            "best_mean_accuracy": self.best_mean_accuracy,
            "points": [
                {"params": p, "mean_accuracy": m, "fold_accuracies": f}
                for p, m, f in zip(self.points, self.mean_accuracies, self.fold_accuracies)
            ],
        }

    def render(self) -> str:
        lines = [f"{'#':>4}  {'mean acc':>8}  params"]
        for i, (p, m) in enumerate(zip(self.points, self.mean_accuracies)):
            mark = "*" if i == self.best_index else " "
            lines.append(f"{i:>3}{mark}  {m:8.4f}  {json.dumps(p)}")
        return "\n".join(lines) + "\n"


FoldHook = Callable[[int, int, Dataset, Dataset, Any], None]


def _evaluate_point(args):
    index, params, base, data, splits, on_fold = args
    try:
        config = base.with_params(params)
        resources = Resources.from_config(config)
    except Exception as exc:
        raise GridSearchError(f"grid point {index} {json.dumps(params)}: {exc}") from exc
    accs = []
    for f, (train_idx, val_idx) in enumerate(splits):
        train, val = data.subset(train_idx), data.subset(val_idx)
        try:
            pipe, _ = train_pipeline(config, train, resources)
            pred = pipe.predict(val.texts)
        except Exception as exc:
            raise GridSearchError(f"grid point {index} {json.dumps(params)}, fold {f}: {exc}") from exc
        if on_fold is not None:
            on_fold(index, f, train, val, pipe)
        accs.append(float(np.mean([p is t for p, t in zip(pred, val.labels)])))
    return accs


def grid_search(grid: GridSpec, base_config: PipelineConfig, data: Dataset, k: int = 5,
                seed: int = 0, n_jobs: int = 1, on_fold: Optional[FoldHook] = None) -> CVResult:
    """Mean k-fold accuracy of every grid point; the earliest best point wins.

    Each fold's training split is over-sampled (if the config enables it) and
    the whole pipeline, vocabulary included, is refit on it; validation splits
    are never resampled. ``on_fold(point, fold, train, val, pipeline)`` is
    called after each fit, in-process only.
    """
    if not data.is_labeled:
        raise DataError("grid search needs labeled data")
    splits = stratified_kfold(data, k, seed)
    points = grid.points()
    jobs = [(i, p, base_config, data, splits, on_fold) for i, p in enumerate(points)]
    if n_jobs > 1 and on_fold is None:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            fold_accs = list(pool.map(_evaluate_point, jobs))
    else:
        fold_accs = [_evaluate_point(j) for j in jobs]
    means = [float(np.mean(a)) for a in fold_accs]
    best = int(np.argmax(means))  # first maximum
    return CVResult(points, fold_accs, means, best, splits)
