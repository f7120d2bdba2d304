import json
from pathlib import Path

import pytest

from tracex.cli import main


@pytest.fixture()
def synth_manifest(tmp_path):
    assert main([
        "synth", "--seed", "5", "--sources", "4", "--targets", "4",
        "--overlap", "0.8", "--out", str(tmp_path / "tb"),
    ]) == 0
    return tmp_path / "tb" / "manifest.json"


def test_validate_ok(synth_manifest, capsys):
    assert main(["validate", str(synth_manifest), "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["all"] == 16
    assert doc["links"] == 4


def test_validate_dangling_id_exit_2(tmp_path, synth_manifest, capsys):
    oracle = synth_manifest.parent / "oracle.txt"
    oracle.write_text(oracle.read_text() + "SRC000 GHOST9\n")
    assert main(["validate", str(synth_manifest)]) == 2
    assert "GHOST9" in capsys.readouterr().err


def test_analyze_writes_report_tree(synth_manifest, tmp_path):
    out = tmp_path / "out"
    assert main([
        "analyze", "--manifest", str(synth_manifest), "--vectorizer", "skipgram",
        "--dim", "8", "--epochs", "2", "--seed", "1", "--out", str(out),
    ]) == 0
    report_dir = out / "reports" / "synthetic-5"
    for name in (
        "records.csv", "records.jsonl", "information.csv", "by_links.csv",
        "correlations.csv", "cases.jsonl", "scatter_loss.svg",
        "scatter_noise.svg", "evaluation.json",
    ):
        assert (report_dir / name).is_file(), name
    assert (out / "run.json").is_file()
    meta = json.loads((out / "run.json").read_text())
    assert meta["config"]["seed"] == 1
    assert meta["testbeds"]["synthetic-5"]["all"] == 16


def test_analyze_vectorizer_none(synth_manifest, tmp_path):
    out = tmp_path / "o2"
    assert main([
        "analyze", "--manifest", str(synth_manifest), "--vectorizer", "none",
        "--out", str(out),
    ]) == 0
    evaluation = json.loads(
        (out / "reports" / "synthetic-5" / "evaluation.json").read_text()
    )
    assert evaluation["scores"]["wmd_sim"]["roc_auc"] is None
    assert evaluation["scores"]["mi"]["roc_auc"] is not None


def test_analyze_bpe_preproc(synth_manifest, tmp_path):
    out = tmp_path / "o3"
    assert main([
        "analyze", "--manifest", str(synth_manifest), "--preproc", "bpe8k",
        "--vectorizer", "none", "--out", str(out),
    ]) == 0


def test_analyze_missing_manifest_exit_2(tmp_path):
    assert main([
        "analyze", "--manifest", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o"),
    ]) == 2


def test_train_bpe_and_reuse(tmp_path, synth_manifest):
    corpus_file = tmp_path / "corpus.txt"
    corpus_file.write_text("lower lower lowest low low low\n")
    model_path = tmp_path / "bpe.json"
    assert main([
        "train-bpe", str(corpus_file), "--vocab-size", "12", "--out", str(model_path),
    ]) == 0
    doc = json.loads(model_path.read_text())
    assert doc["vocab_size"] == 12
    assert doc["merges"]


def test_train_bpe_early_stop_warning(tmp_path, capsys):
    corpus_file = tmp_path / "tiny.txt"
    corpus_file.write_text("ab cd\n")
    assert main([
        "train-bpe", str(corpus_file), "--vocab-size", "8000",
        "--out", str(tmp_path / "m.json"),
    ]) == 0
    assert "warning" in capsys.readouterr().err


def test_train_embeddings_and_load(tmp_path, synth_manifest):
    corpus_file = tmp_path / "corpus.txt"
    corpus_file.write_text("alpha beta alpha beta gamma alpha\n")
    vec_path = tmp_path / "vecs.txt"
    assert main([
        "train-embeddings", str(corpus_file), "--dim", "4", "--epochs", "2",
        "--out", str(vec_path),
    ]) == 0
    out = tmp_path / "o4"
    assert main([
        "analyze", "--manifest", str(synth_manifest), "--embeddings", str(vec_path),
        "--out", str(out),
    ]) == 0  # all pairs OOV against this vocab: undefined, not fatal
    evaluation = json.loads(
        (out / "reports" / "synthetic-5" / "evaluation.json").read_text()
    )
    assert evaluation["scores"]["wmd_sim"]["n_defined"] == 0


def test_cases_subcommand(synth_manifest, tmp_path, capsys):
    out = tmp_path / "o5"
    main(["analyze", "--manifest", str(synth_manifest), "--vectorizer", "none",
          "--out", str(out)])
    capsys.readouterr()
    records = out / "reports" / "synthetic-5" / "records.jsonl"
    assert main(["cases", str(records), "--k", "1", "--json"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    kinds = {json.loads(l)["kind"] for l in lines}
    assert "max_loss" in kinds and "min_loss" in kinds


def test_synth_deterministic_bytes(tmp_path):
    for d in ("t1", "t2"):
        main(["synth", "--seed", "9", "--sources", "3", "--targets", "3",
              "--overlap", "0.5", "--out", str(tmp_path / d)])
    f1 = sorted((tmp_path / "t1").rglob("*"))
    f2 = sorted((tmp_path / "t2").rglob("*"))
    assert [p.name for p in f1] == [p.name for p in f2]
    for p1, p2 in zip(f1, f2):
        if p1.is_file():
            assert p1.read_bytes() == p2.read_bytes()
