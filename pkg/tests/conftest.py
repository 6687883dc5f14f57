import pytest

from offlang.corpus import ClassLabel, Dataset, LabeledText

TEST_LEXICON = ("fuck", "shit", "ass", "bitch", "crap", "damn", "wtf", "suck")


@pytest.fixture
def lexicon_file(tmp_path):
    path = tmp_path / "lexicon.txt"
    path.write_text("# test lexicon\n" + "\n".join(TEST_LEXICON) + "\n", encoding="utf-8")
    return path


def make_dataset(labels, name="toy"):
    return Dataset(
        tuple(LabeledText(f"id{i}", f"text number {i}", ClassLabel(l)) for i, l in enumerate(labels)),
        name,
    )


@pytest.fixture
def toy_dataset():
    return make_dataset(["NOT"] * 7 + ["OFF"] * 3)


def small_config(lexicon_path, **classifier):
    from dataclasses import replace

    from offlang.pipeline import LexiconConfig, PipelineConfig, VectorizerConfig

    cfg = PipelineConfig(vectorizer=VectorizerConfig(3, 4, 1), lexicons=LexiconConfig(profanity=str(lexicon_path)))
    if classifier:
        cfg = replace(cfg, classifier=replace(cfg.classifier, **classifier))
    return cfg


@pytest.fixture
def synthetic_small():
    from offlang.synthetic import generate_corpus

    return generate_corpus(120, TEST_LEXICON, seed=3)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.summary_lines():
            terminalreporter.write_line(line)
