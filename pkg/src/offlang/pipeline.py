"""Pipeline configuration, the fitted text-to-label pipeline and its model file.

Config and model files are JSON. The model file embeds every resource the
active blocks need (stopwords, lexicons, vocabularies) so it is
self-contained; nothing about inactive (weight 0) blocks is written.
"""

from __future__ import annotations

import json
import os
import tempfile
import time
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from offlang import linear
from offlang.balance import random_oversample
from offlang.corpus import ClassLabel, Dataset, TsvSchema, class_distribution
from offlang.errors import ConfigError, DataError, ModelFormatError
from offlang.features import (
    DENSE_DIMS,
    FeatureBlockSpec,
    ProfanityLexicon,
    check_block_names,
    load_valence,
    profanity_features,
    sentiment_score,
    text_stats,
    union_matrix,
)
from offlang.linear import Hyperparams, LinearModel
from offlang.preprocess import CleanConfig, CleanText, clean, load_stopwords, stem_text
from offlang.vectorize import Vocabulary, fit_vocabulary, tfidf_matrix

MODEL_FORMAT = "offlang-model"
MODEL_VERSION = 1

CLASSIFIER_KEYS = ("loss", "penalty", "alpha", "max_iter", "random_state", "eta0", "shuffle")


@dataclass(frozen=True)
class PreprocessConfig:
    stopwords: Optional[str] = None
    drop_placeholders: bool = False


@dataclass(frozen=True)
class VectorizerConfig:
    n_min: int = 3
    n_max: int = 6
    min_df: int = 1

    def __post_init__(self):
        if not (1 <= self.n_min <= self.n_max):
            raise ConfigError(f"invalid n-gram range ({self.n_min}, {self.n_max})")
        if self.min_df < 1:
            raise ConfigError("min_df must be >= 1")


@dataclass(frozen=True)
class LexiconConfig:
    profanity: Optional[str] = None  # None selects the bundled list
    valence: Optional[str] = None


@dataclass(frozen=True)
class OversampleConfig:
    enabled: bool = True
    seed: int = 69


@dataclass(frozen=True)
class TsvConfig:
    id_col: int = 0
    text_col: int = 1
    label_col: int = 2
    has_header: bool = False
    negative_label: str = "NOT"
    positive_label: str = "OFF"

    def schema(self, labeled: bool = True) -> TsvSchema:
        s = TsvSchema(self.id_col, self.text_col, self.label_col,
                      self.negative_label, self.positive_label)
        return s if labeled else s.unlabeled()


DEFAULT_BLOCKS = (
    FeatureBlockSpec("profanity", 0.8),
    FeatureBlockSpec("tfidf_clean", 1.2),
    FeatureBlockSpec("sentiment", 0.0),
    FeatureBlockSpec("tfidf_stemmed", 0.0),
    FeatureBlockSpec("text_stats", 0.0),
)


@dataclass(frozen=True)
class PipelineConfig:
    preprocess: PreprocessConfig = PreprocessConfig()
    vectorizer: VectorizerConfig = VectorizerConfig()
    blocks: tuple = DEFAULT_BLOCKS
    lexicons: LexiconConfig = LexiconConfig()
    classifier: Hyperparams = Hyperparams()
    oversample: OversampleConfig = OversampleConfig()
    tsv: TsvConfig = TsvConfig()
    base_dir: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        check_block_names(self.blocks)
        if not any(b.active for b in self.blocks):
            raise ConfigError("at least one feature block needs a weight > 0")

    @property
    def active_blocks(self) -> tuple:
        return tuple(b for b in self.blocks if b.active)

    def block(self, name: str) -> Optional[FeatureBlockSpec]:
        return next((b for b in self.blocks if b.name == name), None)

    def resolve(self, path: Optional[str]) -> Optional[Path]:
        if path is None:
            return None
        p = Path(path)
        if not p.is_absolute() and self.base_dir is not None:
            p = Path(self.base_dir) / p
        return p

    def to_dict(self) -> dict:
        return {
            "preprocess": asdict(self.preprocess),
            "vectorizer": asdict(self.vectorizer),
            "blocks": [{"name": b.name, "weight": b.weight} for b in self.blocks],
            "lexicons": asdict(self.lexicons),
            "classifier": self.classifier.to_dict(),
            "oversample": asdict(self.oversample),
            "tsv": asdict(self.tsv),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any], base_dir=None) -> "PipelineConfig":
        if not isinstance(d, Mapping):
            raise ConfigError("config must be a JSON object")
        sections = {
            "preprocess": PreprocessConfig,
            "vectorizer": VectorizerConfig,
            "lexicons": LexiconConfig,
            "classifier": Hyperparams,
            "oversample": OversampleConfig,
            "tsv": TsvConfig,
        }
        unknown = set(d) - set(sections) - {"blocks"}
        if unknown:
            raise ConfigError(f"unknown config sections: {', '.join(sorted(unknown))}")
        kwargs: dict = {}
        for key, klass in sections.items():
            if key in d:
                kwargs[key] = _build(klass, d[key], key)
        if "blocks" in d:
            try:
                kwargs["blocks"] = tuple(FeatureBlockSpec(b["name"], b["weight"]) for b in d["blocks"])
            except (KeyError, TypeError) as exc:
                raise ConfigError(f"blocks: each entry needs 'name' and 'weight' ({exc})") from None
        return cls(**kwargs, base_dir=None if base_dir is None else str(base_dir))

    def with_params(self, params: Mapping[str, Any]) -> "PipelineConfig":
        """Copy with classifier keys and ``weight.<block>`` entries overridden."""
        clf = {}
        weights = {}
        for key, value in params.items():
            if key in CLASSIFIER_KEYS:
                clf[key] = value
            elif key.startswith("weight."):
                weights[key[len("weight."):]] = value
            else:
                raise ConfigError(f"unknown grid parameter {key!r}")
        blocks = [replace(b, weight=weights.pop(b.name)) if b.name in weights else b for b in self.blocks]
        blocks += [FeatureBlockSpec(name, w) for name, w in weights.items()]
        return replace(self, classifier=replace(self.classifier, **clf), blocks=tuple(blocks))


def _build(klass, values, section):
    if not isinstance(values, Mapping):
        raise ConfigError(f"section {section!r} must be an object")
    allowed = {f.name for f in fields(klass)}
    unknown = set(values) - allowed
    if unknown:
        raise ConfigError(f"{section}: unknown keys {', '.join(sorted(unknown))}")
    try:
        return klass(**values)
    except TypeError as exc:
        raise ConfigError(f"{section}: {exc}") from None


def default_config() -> PipelineConfig:
    return PipelineConfig()


def load_config(path) -> PipelineConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return PipelineConfig.from_dict(data, base_dir=path.parent)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=1, ensure_ascii=False) + "\n"


def write_atomic(path, text: str) -> None:
    """Write ``text`` via a temporary sibling so failures leave no partial file."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- resources ---------------------------------------------------------------

@dataclass(frozen=True)
class Resources:
    stopwords: frozenset = frozenset()
    profanity: Optional[ProfanityLexicon] = None
    valence: Optional[dict] = None

    @classmethod
    def from_config(cls, config: PipelineConfig) -> "Resources":
        stopwords = frozenset()
        if config.preprocess.stopwords is not None:
            stopwords = load_stopwords(config.resolve(config.preprocess.stopwords))
        profanity = valence = None
        prof = config.block("profanity")
        if prof is not None and prof.active:
            path = config.resolve(config.lexicons.profanity)
            profanity = ProfanityLexicon.load(path) if path else ProfanityLexicon.bundled()
            if len(profanity) == 0:
                raise ConfigError("profanity block is active but the lexicon is empty")
        sent = config.block("sentiment")
        if sent is not None and sent.active:
            path = config.resolve(config.lexicons.valence)
            if path is None:
                raise ConfigError("sentiment block is active but lexicons.valence is not set")
            valence = load_valence(path)
        return cls(stopwords, profanity, valence)


# --- pipeline ----------------------------------------------------------------

class Pipeline:
    """Text in, NOT/OFF out: cleaning, feature blocks, union, linear model."""

    def __init__(self, config: PipelineConfig, resources: Optional[Resources] = None):
        self.config = config
        self.resources = resources if resources is not None else Resources.from_config(config)
        self.clean_cfg = CleanConfig(self.resources.stopwords, config.preprocess.drop_placeholders)
        self.vocabularies: dict[str, Vocabulary] = {}
        self.block_dims: dict[str, int] = {}
        self.model: Optional[LinearModel] = None

    # features

    def _block(self, name: str, texts: Sequence[str], cleaned: list[CleanText], fit: bool):
        if name in ("tfidf_clean", "tfidf_stemmed"):
            docs = [c.tokens for c in cleaned]
            if name == "tfidf_stemmed":
                docs = [stem_text(c).tokens for c in cleaned]
            if fit:
                v = self.config.vectorizer
                self.vocabularies[name] = fit_vocabulary(docs, v.n_min, v.n_max, v.min_df)
            return tfidf_matrix(docs, self.vocabularies[name])
        if name == "profanity":
            rows = [profanity_features(c, self.resources.profanity) for c in cleaned]
        elif name == "sentiment":
            rows = [sentiment_score(c, self.resources.valence) for c in cleaned]
        else:
            rows = [text_stats(t) for t in texts]
        dense = np.vstack(rows) if rows else np.empty((0, DENSE_DIMS[name]))
        return sp.csr_matrix(dense)

    def _features(self, texts: Sequence[str], fit: bool) -> sp.csr_matrix:
        cleaned = [clean(t, self.clean_cfg) for t in texts]
        parts = []
        for spec in self.config.active_blocks:
            mat = self._block(spec.name, texts, cleaned, fit)
            if fit:
                self.block_dims[spec.name] = mat.shape[1]
            elif mat.shape[1] != self.block_dims[spec.name]:
                raise DataError(f"block {spec.name!r} produced {mat.shape[1]} columns, fitted {self.block_dims[spec.name]}")
            parts.append((spec, mat))
        return union_matrix(parts)

    def transform(self, texts: Sequence[str]) -> sp.csr_matrix:
        self._require_fitted()
        return self._features(list(texts), fit=False)

    # training / inference

    def fit(self, data: Dataset, backend: Optional[str] = None) -> "Pipeline":
        if len(data) == 0 or not data.is_labeled:
            raise DataError("training needs a non-empty labeled dataset")
        self.vocabularies, self.block_dims = {}, {}
        X = self._features(data.texts, fit=True)
        self.model = linear.fit(X, data.labels, self.config.classifier, backend=backend)
        return self

    def _require_fitted(self):
        if self.model is None:
            raise ModelFormatError("pipeline is not fitted")

    def decision_function(self, texts: Sequence[str]) -> np.ndarray:
        return linear.decision_function(self.model, self.transform(texts))

    def predict(self, texts: Sequence[str]) -> list[ClassLabel]:
        return linear.predict(self.model, self.transform(texts))

    def predict_proba(self, texts: Sequence[str]) -> np.ndarray:
        self._require_fitted()
        return linear.predict_proba(self.model, self.transform(texts))

    @property
    def supports_proba(self) -> bool:
        return self.model is not None and self.model.supports_proba

    # persistence

    def block_layout(self) -> list[dict]:
        layout, offset = [], 0
        for spec in self.config.active_blocks:
            dim = self.block_dims[spec.name]
            layout.append({"name": spec.name, "weight": spec.weight, "dim": dim, "offset": offset})
            offset += dim
        return layout

    def to_dict(self) -> dict:
        self._require_fitted()
        cfg = self.config.to_dict()
        cfg["blocks"] = [{"name": b.name, "weight": b.weight} for b in self.config.active_blocks]
        cfg["preprocess"]["stopwords"] = None
        cfg["lexicons"] = {"profanity": None, "valence": None}
        res = self.resources
        return {
            "format": MODEL_FORMAT,
            "format_version": MODEL_VERSION,
            "config": cfg,
            "resources": {
                "stopwords": sorted(res.stopwords),
                "profanity": sorted(res.profanity.words) if res.profanity is not None else None,
                "valence": dict(sorted(res.valence.items())) if res.valence is not None else None,
            },
            "blocks": self.block_layout(),
            "vocabularies": {name: v.to_dict() for name, v in sorted(self.vocabularies.items())},
            "model": {
                "dim": self.model.dim,
                "bias": self.model.bias,
                "objectives": self.model.objectives,
                "weights": self.model.weights.tolist(),
            },
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Pipeline":
        if not isinstance(d, Mapping) or d.get("format") != MODEL_FORMAT:
            raise ModelFormatError("not an offlang model file")
        if d.get("format_version") != MODEL_VERSION:
            raise ModelFormatError(f"unsupported model format_version {d.get('format_version')!r}")
        try:
            config = PipelineConfig.from_dict(d["config"])
            r = d["resources"]
            resources = Resources(
                frozenset(r["stopwords"]),
                ProfanityLexicon(frozenset(r["profanity"])) if r["profanity"] is not None else None,
                dict(r["valence"]) if r["valence"] is not None else None,
            )
            pipe = cls(config, resources)
            pipe.vocabularies = {k: Vocabulary.from_dict(v) for k, v in d["vocabularies"].items()}
            offset = 0
            for spec, entry in zip(config.active_blocks, d["blocks"], strict=True):
                if entry["name"] != spec.name or entry["offset"] != offset:
                    raise ModelFormatError("block layout does not match the config")
                pipe.block_dims[spec.name] = int(entry["dim"])
                offset += int(entry["dim"])
            m = d["model"]
            weights = np.array(m["weights"], dtype=np.float64)
            if weights.shape != (offset,) or m["dim"] != offset:
                raise ModelFormatError(f"weight vector has {weights.size} entries, blocks need {offset}")
            for name, vocab in pipe.vocabularies.items():
                if pipe.block_dims.get(name) != len(vocab):
                    raise ModelFormatError(f"vocabulary {name!r} size does not match its block")
            pipe.model = LinearModel(weights, float(m["bias"]), config.classifier, list(m["objectives"]))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ModelFormatError):
                raise
            raise ModelFormatError(f"corrupt model file: {exc}") from None
        return pipe

    def save(self, path) -> None:
        write_atomic(path, dump_json(self.to_dict()))

    @classmethod
    def load(cls, path) -> "Pipeline":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ModelFormatError(f"cannot read model {path}: {exc.strerror or exc}") from exc
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(data)


@dataclass
class TrainSummary:
    class_distribution: dict
    balanced_counts: dict
    final_objective: float
    wall_time: float

    def render(self) -> str:
        lines = ["class distribution:"]
        for label, (count, frac) in self.class_distribution.items():
            lines.append(f"  {label.value}: {count} ({frac:.3f})")
        lines.append("after over-sampling: " + ", ".join(
            f"{label.value}={n}" for label, n in self.balanced_counts.items()))
        lines.append(f"final objective: {self.final_objective:.6f}")
        lines.append(f"wall time: {self.wall_time:.2f}s")
        return "\n".join(lines) + "\n"


def train_pipeline(config: PipelineConfig, data: Dataset, resources: Optional[Resources] = None,
                   backend: Optional[str] = None) -> tuple[Pipeline, TrainSummary]:
    """Over-sample (when enabled) then fit a fresh pipeline on ``data``."""
    start = time.perf_counter()
    dist = class_distribution(data)
    train = random_oversample(data, config.oversample.seed) if config.oversample.enabled else data
    balanced = {label: n for label, (n, _) in class_distribution(train).items()}
    pipe = Pipeline(config, resources).fit(train, backend=backend)
    summary = TrainSummary(dist, balanced, pipe.model.objectives[-1], time.perf_counter() - start)
    return pipe, summary
