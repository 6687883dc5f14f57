import json
import subprocess
import sys

import pytest

from conftest import TEST_LEXICON
from offlang.cli import main
from offlang.corpus import save_tsv
from offlang.synthetic import generate_corpus


@pytest.fixture
def workspace(tmp_path, lexicon_file):
    data = generate_corpus(150, TEST_LEXICON, seed=5)
    save_tsv(data, tmp_path / "train.tsv")
    (tmp_path / "unlabeled.tsv").write_text(
        "u1\tyou are a shit person\nu2\thave a nice day\n", encoding="utf-8")
    cfg = {"vectorizer": {"n_min": 3, "n_max": 4, "min_df": 1},
           "lexicons": {"profanity": str(lexicon_file), "valence": None}}
    (tmp_path / "cfg.json").write_text(json.dumps(cfg))
    return tmp_path


def run(*argv):
    return main([str(a) for a in argv])


def train(ws, name="model.json", cfg="cfg.json", *extra):
    return run("train", "--config", ws / cfg, "--data", ws / "train.tsv", "--out", ws / name, *extra)


def test_train_evaluate_predict(workspace, capsys):
    ws = workspace
    assert train(ws) == 0
    assert "class distribution" in capsys.readouterr().out
    assert run("evaluate", "--model", ws / "model.json", "--data", ws / "train.tsv") == 0
    out = capsys.readouterr().out
    assert "macro avg" in out and "confusion matrix" in out
    assert run("predict", "--model", ws / "model.json", "--data", ws / "unlabeled.tsv",
               "--out", ws / "pred.tsv") == 0
    rows = [l.split("\t") for l in (ws / "pred.tsv").read_text().splitlines()]
    assert [r[0] for r in rows] == ["u1", "u2"]
    assert rows[0][1] == "OFF" and rows[1][1] == "NOT"
    assert 0.5 < float(rows[0][2]) <= 1.0 and len(rows[0][2].split(".")[1]) == 6


def test_evaluate_flat(workspace, capsys):
    train(workspace)
    capsys.readouterr()
    assert run("evaluate", "--model", workspace / "model.json", "--data", workspace / "train.tsv",
               "--format", "flat") == 0
    lines = capsys.readouterr().out.splitlines()
    keys = dict(l.split("=") for l in lines)
    assert "accuracy" in keys and "confusion.OFF.NOT" in keys and "macro_avg.f1" in keys


def test_train_deterministic(workspace):
    train(workspace, "a.json")
    train(workspace, "b.json")
    assert (workspace / "a.json").read_bytes() == (workspace / "b.json").read_bytes()
    train(workspace, "c.json", "cfg.json", "--seed", "7")
    assert (workspace / "a.json").read_bytes() != (workspace / "c.json").read_bytes()


def test_hinge_predict_blank_proba_and_explain_refused(workspace, capsys):
    cfg = json.loads((workspace / "cfg.json").read_text())
    cfg["classifier"] = {"loss": "hinge"}
    (workspace / "hinge.json").write_text(json.dumps(cfg))
    assert train(workspace, "h.json", "hinge.json") == 0
    assert run("predict", "--model", workspace / "h.json", "--data", workspace / "unlabeled.tsv",
               "--out", workspace / "p.tsv") == 0
    assert all(l.endswith("\t") for l in (workspace / "p.tsv").read_text().splitlines())
    capsys.readouterr()
    assert run("explain", "--model", workspace / "h.json", "--text", "shit") == 1
    assert "probabilities unavailable" in capsys.readouterr().err


def test_zero_weight_model_predicts_not(workspace):
    train(workspace)
    model = json.loads((workspace / "model.json").read_text())
    model["model"]["weights"] = [0.0] * model["model"]["dim"]
    model["model"]["bias"] = 0.0
    (workspace / "zero.json").write_text(json.dumps(model))
    run("predict", "--model", workspace / "zero.json", "--data", workspace / "unlabeled.tsv",
        "--out", workspace / "p.tsv")
    for line in (workspace / "p.tsv").read_text().splitlines():
        assert line.split("\t")[1:] == ["NOT", "0.500000"]


def test_all_zero_weight_config_refused(workspace, capsys):
    cfg = json.loads((workspace / "cfg.json").read_text())
    cfg["blocks"] = [{"name": "profanity", "weight": 0}, {"name": "tfidf_clean", "weight": 0}]
    (workspace / "zero_cfg.json").write_text(json.dumps(cfg))
    assert train(workspace, "z.json", "zero_cfg.json") == 1
    assert "weight > 0" in capsys.readouterr().err
    assert not (workspace / "z.json").exists()


def test_explain_profane_token_in_top3(workspace, capsys):
    train(workspace)
    capsys.readouterr()
    assert run("explain", "--model", workspace / "model.json",
               "--text", "honestly this game is shit and boring", "--n-samples", 300) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "[text]"
    assert "shit" in [l.split()[2] for l in lines[4:7]]


def test_explain_data_writes_files(workspace, capsys):
    train(workspace)
    out = workspace / "expl"
    assert run("explain", "--model", workspace / "model.json", "--data", workspace / "unlabeled.tsv",
               "--out", out, "--n-samples", 100) == 0
    assert sorted(p.name for p in out.iterdir()) == ["u1.html", "u1.txt", "u2.html", "u2.txt"]


def test_explain_empty_text(workspace, capsys):
    train(workspace)
    assert run("explain", "--model", workspace / "model.json", "--text", "  ") == 1


def test_gridsearch(workspace, capsys):
    (workspace / "grid.json").write_text(json.dumps({"alpha": [0.01, 0.001], "loss": ["hinge", "log"]}))
    assert run("gridsearch", "--config", workspace / "cfg.json", "--grid", workspace / "grid.json",
               "--data", workspace / "train.tsv", "--folds", 3, "--out", workspace / "gs.json") == 0
    doc = json.loads((workspace / "gs.json").read_text())
    assert len(doc["points"]) == 4 and doc["k"] == 3
    best = json.loads((workspace / "gs.best_config.json").read_text())
    assert best["classifier"]["alpha"] == doc["best_params"]["alpha"]
    assert train(workspace, "best.json", "gs.best_config.json") == 0


def test_domain_errors_exit_1(workspace, capsys):
    assert run("evaluate", "--model", workspace / "missing.json", "--data", workspace / "train.tsv") == 1
    (workspace / "bad.tsv").write_text("a\tb\tMAYBE\n")
    assert run("train", "--config", workspace / "cfg.json", "--data", workspace / "bad.tsv",
               "--out", workspace / "m.json") == 1
    err = capsys.readouterr().err
    assert "bad.tsv:1" in err and "Traceback" not in err


def test_usage_errors_exit_2(capsys):
    assert main([]) == 2
    with pytest.raises(SystemExit) as e:
        main(["train"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["evaluate", "--model", "m", "--data", "d", "--format", "xml"])
    assert e.value.code == 2


def test_print_default_config(capsys):
    assert main(["--print-default-config"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["classifier"]["loss"] == "modified_huber"


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "offlang.cli", "--print-default-config"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["oversample"]["seed"] == 69
    proc = subprocess.run([sys.executable, "-m", "offlang.cli", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 2
