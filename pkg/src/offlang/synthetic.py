"""Synthetic tweet corpora whose labels are driven by a profanity lexicon.

Used by the test suite and the benchmark; not a model of real tweet data.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from offlang.corpus import ClassLabel, Dataset, LabeledText

NEUTRAL_WORDS = (
    "about after again all also always and another any around away back because been "
    "before best better between big both bring call came can city come could country "
    "day did different does done down during each early end enough even every family "
    "feel few find first follow food found friend from game get give going good great "
    "group hand happy hard have head hear help here high home hope house idea important "
    "just keep kind know large last late learn leave left life light like line little "
    "live long look love made make many maybe mean might money more morning most move "
    "much music must name need never new news next nice night nothing now number often "
    "old once only open other over own people picture place play point power problem "
    "public put question read ready real right road room run said same school see seem "
    "should show side since small something soon sound start state still story study "
    "such sure take talk team tell than thank that their them then there these thing "
    "think this those though thought three through time today together told took "
    "tomorrow too tried true try turn under until upon very vote walk want watch water "
    "week well went were what when where which while white who whole why will with "
    "without word work world would write year yes yet young your"
).split()


def generate_corpus(n: int, lexicon: Sequence[str], seed: int, offensive_rate: float = 0.33,
                    noise: float = 0.1, name: str = "synthetic") -> Dataset:
    """``n`` tweets; a tweet is OFF iff it contains a lexicon word, then each
    label is flipped with probability ``noise``."""
    rng = np.random.default_rng(seed)
    lexicon = sorted(lexicon)
    examples = []
    for i in range(n):
        words = list(rng.choice(NEUTRAL_WORDS, size=rng.integers(4, 14)))
        offensive = rng.random() < offensive_rate
        if offensive:
            for _ in range(rng.integers(1, 3)):
                word = str(rng.choice(lexicon))
                if rng.random() < 0.3:
                    word = word.upper()
                if rng.random() < 0.2:
                    word += "!"
                words.insert(int(rng.integers(0, len(words) + 1)), word)
        if rng.random() < 0.4:
            words.insert(0, "@USER")
        if rng.random() < 0.1:
            words.append("URL")
        label = ClassLabel.OFF if offensive else ClassLabel.NOT
        if rng.random() < noise:
            label = ClassLabel.NOT if offensive else ClassLabel.OFF
        examples.append(LabeledText(f"s{i:05d}", " ".join(words), label))
    return Dataset(tuple(examples), name)


def split_dataset(data: Dataset, fractions: Sequence[float], seed: int) -> list[Dataset]:
    """Shuffle and cut ``data`` into consecutive parts of the given fractions."""
    order = np.random.default_rng(seed).permutation(len(data))
    bounds = np.round(np.cumsum([0.0, *fractions]) * len(data)).astype(int)
    bounds[-1] = len(data)
    return [data.subset(sorted(order[a:b].tolist()), f"{data.name}[{j}]")
            for j, (a, b) in enumerate(zip(bounds[:-1], bounds[1:]))]
