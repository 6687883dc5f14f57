"""Labeled tweet datasets stored as tab-separated files."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from offlang.errors import DataError


class ClassLabel(enum.Enum):
    NOT = "NOT"
    OFF = "OFF"

    @property
    def sign(self) -> int:
        """+1 for the offensive (positive) class, -1 otherwise."""
        return 1 if self is ClassLabel.OFF else -1

    @classmethod
    def from_sign(cls, value: float) -> "ClassLabel":
        return cls.OFF if value > 0 else cls.NOT


@dataclass(frozen=True)
class LabeledText:
    id: str
    text: str
    label: Optional[ClassLabel] = None

    def __post_init__(self):
        if not self.id:
            raise DataError("example id must be non-empty")
        if not self.text.strip():
            raise DataError(f"example {self.id!r} has empty text")


@dataclass(frozen=True)
class Dataset:
    examples: tuple[LabeledText, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "examples", tuple(self.examples))
        seen = set()
        for ex in self.examples:
            if ex.id in seen:
                raise DataError(f"duplicate id {ex.id!r} in dataset {self.name!r}")
            seen.add(ex.id)
        labeled = [ex.label is not None for ex in self.examples]
        if any(labeled) and not all(labeled):
            raise DataError(f"dataset {self.name!r} mixes labeled and unlabeled rows")

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    def __getitem__(self, i):
        return self.examples[i]

    @property
    def is_labeled(self) -> bool:
        return bool(self.examples) and self.examples[0].label is not None

    @property
    def ids(self) -> list[str]:
        return [ex.id for ex in self.examples]

    @property
    def texts(self) -> list[str]:
        return [ex.text for ex in self.examples]

    @property
    def labels(self) -> list[ClassLabel]:
        return [ex.label for ex in self.examples]

    def subset(self, indices: Iterable[int], name: Optional[str] = None) -> "Dataset":
        return Dataset(tuple(self.examples[i] for i in indices), name or self.name)


@dataclass(frozen=True)
class TsvSchema:
    """Column layout of a TSV file; ``label_col`` is None for unlabeled data."""

    id_col: int = 0
    text_col: int = 1
    label_col: Optional[int] = 2
    negative_label: str = "NOT"
    positive_label: str = "OFF"

    @property
    def width(self) -> int:
        cols = [self.id_col, self.text_col]
        if self.label_col is not None:
            cols.append(self.label_col)
        return max(cols) + 1

    def unlabeled(self) -> "TsvSchema":
        return TsvSchema(self.id_col, self.text_col, None, self.negative_label, self.positive_label)

    def parse_label(self, token: str) -> ClassLabel:
        if token == self.negative_label:
            return ClassLabel.NOT
        if token == self.positive_label:
            return ClassLabel.OFF
        raise DataError(
            f"unknown label {token!r} (expected {self.negative_label!r} or {self.positive_label!r})"
        )

    def format_label(self, label: ClassLabel) -> str:
        return self.positive_label if label is ClassLabel.OFF else self.negative_label


def load_tsv(path, schema: TsvSchema = TsvSchema(), has_header: bool = False,
             name: Optional[str] = None) -> Dataset:
    """Read a UTF-8 tab-separated dataset.

    Rows keep file order. Completely empty lines are skipped; anything else
    that does not fit ``schema`` raises :class:`DataError` naming the line.
    """
    path = Path(path)
    if any(c < 0 for c in (schema.id_col, schema.text_col)) or (
        schema.label_col is not None and schema.label_col < 0
    ):
        raise DataError("column indices must be non-negative")
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        content = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: invalid UTF-8 at byte {exc.start}") from exc

    lines = content.split("\n")
    examples = []
    for lineno, line in enumerate(lines, start=1):
        if lineno == 1 and has_header:
            continue
        line = line.rstrip("\r")
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) < schema.width:
            raise DataError(
                f"{path}:{lineno}: expected at least {schema.width} columns, found {len(cols)}"
            )
        label = None
        try:
            if schema.label_col is not None:
                label = schema.parse_label(cols[schema.label_col].strip())
            examples.append(LabeledText(cols[schema.id_col].strip(), cols[schema.text_col], label))
        except DataError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from None
    try:
        return Dataset(tuple(examples), name if name is not None else path.name)
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from None


def save_tsv(data: Dataset, path, schema: TsvSchema = TsvSchema(),
             header: Optional[list[str]] = None) -> None:
    """Write ``data`` in the layout :func:`load_tsv` reads back unchanged."""
    width = schema.width
    rows = []
    if header is not None:
        rows.append("\t".join(header))
    for ex in data:
        cols = [""] * width
        cols[schema.id_col] = ex.id
        cols[schema.text_col] = ex.text
        if schema.label_col is not None:
            if ex.label is None:
                raise DataError(f"example {ex.id!r} has no label but schema requires one")
            cols[schema.label_col] = schema.format_label(ex.label)
        rows.append("\t".join(cols))
    Path(path).write_text("".join(r + "\n" for r in rows), encoding="utf-8")


def class_distribution(data: Dataset) -> dict[ClassLabel, tuple[int, float]]:
    """Count and fraction of each class, NOT first."""
    if len(data) == 0:
        raise DataError("class distribution of an empty dataset")
    if not data.is_labeled:
        raise DataError("class distribution requires a labeled dataset")
    counts = {ClassLabel.NOT: 0, ClassLabel.OFF: 0}
    for ex in data:
        counts[ex.label] += 1
    n = len(data)
    return {label: (c, c / n) for label, c in counts.items()}
