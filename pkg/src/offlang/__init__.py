"""Offensive-tweet classification toolkit.

Character n-gram TF-IDF plus lexicon features, random over-sampling, an SGD
linear classifier, grid-search model selection, classification reports and a
perturbation-based text explainer.
"""

from offlang.corpus import ClassLabel, Dataset, LabeledText, class_distribution, load_tsv
from offlang.errors import (
    ConfigError,
    DataError,
    GridSearchError,
    ModelFormatError,
    OfflangError,
    ProbabilityUnavailableError,
)

__version__ = "0.1.0"

__all__ = [
    "ClassLabel",
    "ConfigError",
    "DataError",
    "Dataset",
    "GridSearchError",
    "LabeledText",
    "ModelFormatError",
    "OfflangError",
    "ProbabilityUnavailableError",
    "class_distribution",
    "load_tsv",
]
