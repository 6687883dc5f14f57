import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from offlang.balance import random_oversample
from offlang.corpus import ClassLabel, class_distribution
from offlang.errors import DataError

from conftest import make_dataset


def counts(data):
    return {c: n for c, (n, _) in class_distribution(data).items()}


def test_seven_three(toy_dataset):
    out = random_oversample(toy_dataset, seed=0)
    assert len(out) == 14
    assert counts(out) == {ClassLabel.NOT: 7, ClassLabel.OFF: 7}
    assert out.examples[:10] == toy_dataset.examples
    off_texts = {ex.text for ex in toy_dataset if ex.label is ClassLabel.OFF}
    for i, ex in enumerate(out.examples[10:], start=1):
        assert ex.id.endswith(f"#dup{i}")
        assert ex.text in off_texts and ex.label is ClassLabel.OFF


def test_balanced_unchanged():
    data = make_dataset(["NOT", "OFF"] * 5)
    assert random_oversample(data, 3) is data


def test_determinism(toy_dataset):
    assert random_oversample(toy_dataset, 9) == random_oversample(toy_dataset, 9)
    other = random_oversample(toy_dataset, 10)
    assert counts(other) == counts(random_oversample(toy_dataset, 9))


def test_single_class_rejected():
    with pytest.raises(DataError):
        random_oversample(make_dataset(["NOT"] * 4), 0)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from(["NOT", "OFF"]), min_size=2, max_size=60), st.integers(0, 2**32 - 1))
def test_properties(labels, seed):
    data = make_dataset(labels)
    if len(set(labels)) < 2:
        with pytest.raises(DataError):
            random_oversample(data, seed)
        return
    out = random_oversample(data, seed)
    c = counts(out)
    assert c[ClassLabel.NOT] == c[ClassLabel.OFF]
    assert out.examples[: len(data)] == data.examples
    majority = max(ClassLabel, key=lambda k: counts(data)[k])
    if counts(data)[ClassLabel.NOT] != counts(data)[ClassLabel.OFF]:
        assert all(ex.label is not majority for ex in out.examples[len(data):])
    originals = {(ex.text, ex.label) for ex in data}
    assert all((ex.text, ex.label) in originals for ex in out.examples[len(data):])
