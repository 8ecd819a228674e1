#!/usr/bin/env python3
# -*- coding: utf-8 -*-
import json
import logging
import os

import pytest

from cli import main
from utils.file_utils import FileUtils

TINY_TRAIN = ["--hidden", "4", "--embed", "4", "--latent", "2", "--batch", "4", "--epochs", "1",
              "--pairs", "8", "--max-len", "4", "--vocab-size", "5", "--seed", "3"]


def _train(directory, variant="ved-vattn-hbar"):
    code = main(["train", "--variant", variant, "--output", str(directory)] + TINY_TRAIN)
    assert code == 0
    return os.path.join(str(directory), "model.ckpt")


@pytest.fixture
def sources_file(tmp_path):
    path = tmp_path / "sources.txt"
    path.write_text("w1 w2 w3\nw0 w4\n")
    return str(path)


def test_train_is_reproducible(tmp_path):
    first = _train(tmp_path / "a")
    second = _train(tmp_path / "b")
    with open(first, "rb") as f1, open(second, "rb") as f2:
        assert f1.read() == f2.read()
    rows = FileUtils().read_metrics_log(str(tmp_path / "a" / "metrics.log"))
    assert [row["epoch"] for row in rows] == [1]


def test_train_rejects_unknown_variant(tmp_path, capsys):
    assert main(["train", "--variant", "nope", "--output", str(tmp_path)] + TINY_TRAIN) == 2
    assert "ved-vattn-hbar" in capsys.readouterr().out


def test_generate_map_is_deterministic(tmp_path, sources_file):
    checkpoint = _train(tmp_path / "model")
    outputs = []
    for name in ("g1.txt", "g2.txt"):
        out = str(tmp_path / name)
        assert main(["generate", "--checkpoint", checkpoint, "--input", sources_file, "--output", out]) == 0
        with open(out, encoding="utf-8") as f:
            outputs.append(f.read())
    assert outputs[0] == outputs[1]
    blocks = FileUtils().read_generations(str(tmp_path / "g1.txt"))
    assert [source_id for source_id, _ in blocks] == [0, 1]
    assert all(lines[0][0] == "map" and len(lines) == 1 for _, lines in blocks)


def test_generate_sampling_count(tmp_path, sources_file):
    checkpoint = _train(tmp_path / "model")
    out = str(tmp_path / "samples.txt")
    assert main(["generate", "--checkpoint", checkpoint, "--input", sources_file, "--mode", "sampling",
                 "--n", "3", "--seed", "5", "--output", out]) == 0
    blocks = FileUtils().read_generations(out)
    assert [len(lines) for _, lines in blocks] == [3, 3]
    assert all(tag != "map" for _, lines in blocks for tag, _ in lines)


def test_generate_errors(tmp_path, sources_file):
    checkpoint = _train(tmp_path / "ded", variant="ded")
    out = str(tmp_path / "out.txt")
    assert main(["generate", "--checkpoint", checkpoint, "--input", sources_file,
                 "--mode", "sampling", "--output", out]) == 2
    assert main(["generate", "--checkpoint", str(tmp_path / "missing.ckpt"), "--input", sources_file,
                 "--output", out]) == 1
    assert not os.path.exists(out)


def test_evaluate_identical_references(tmp_path, capsys):
    utils = FileUtils()
    generations = str(tmp_path / "gen.txt")
    references = tmp_path / "refs.txt"
    references.write_text("src\ta b c d e\nsrc\tf g h i\n")
    utils.write_generations(generations, [(0, [("map", "a b c d e")]), (1, [("map", "f g h i")])])
    report = str(tmp_path / "report.txt")
    assert main(["evaluate", "--generations", generations, "--references", str(references),
                 "--output", report]) == 0
    values = utils.read_report(report)
    assert values["bleu4"] == pytest.approx(1.0)
    assert "dist1" not in values
    assert "bleu4=1" in capsys.readouterr().out


def test_evaluate_sampled_and_misaligned(tmp_path):
    utils = FileUtils()
    generations = str(tmp_path / "gen.txt")
    references = tmp_path / "refs.txt"
    references.write_text("a b\n")
    utils.write_generations(generations, [(0, [("11", "a b"), ("12", "a a")])])
    report = str(tmp_path / "report.txt")
    assert main(["evaluate", "--generations", generations, "--references", str(references),
                 "--output", report]) == 0
    values = utils.read_report(report)
    assert values["dist1"] == pytest.approx(2 / 4)
    references.write_text("a b\nc d\n")
    assert main(["evaluate", "--generations", generations, "--references", str(references)]) == 1


def test_gradcheck_passes_for_variant(capsys):
    assert main(["gradcheck", "--variant", "ded-dattn", "--seed", "1"]) == 0
    assert "✅" in capsys.readouterr().out


def test_gradcheck_detects_injected_fault(capsys):
    assert main(["gradcheck", "--variant", "ved", "--inject-fault", "out_W", "--seed", "1"]) == 1
    assert "out_W" in capsys.readouterr().out


def test_gradcheck_usage_errors():
    assert main(["gradcheck", "--variant", "ved-attn"]) == 2
    assert main(["gradcheck", "--variant", "ded", "--inject-fault", "attn_var_W"]) == 2


def test_bypass_experiment_writes_reports(tmp_path, capsys):
    out = tmp_path / "bypass"
    args = ["bypass-experiment", "--variants", "ved,ved-hinit", "--seeds", "1", "--gamma-sweep", "0.1",
            "--epochs", "1", "--pairs", "30", "--max-len", "5", "--heldout", "5", "--n", "2",
            "--hidden", "4", "--embed", "4", "--latent", "2", "--batch", "10", "--output-dir", str(out)]
    assert main(args) == 0
    with open(out / "bypass_s1_g0.1.json", encoding="utf-8") as f:
        report = json.load(f)
    assert [row["variant"] for row in report["rows"]] == ["ved", "ved-hinit"]
    assert "hinit_lower_kl_z" in report["checks"]
    assert os.path.exists(out / "bypass_s1_g0.1.xlsx")
    assert os.path.exists(out / "checkpoints" / "ved-hinit_s1_g0.1.ckpt")
    with open(out / "bypass_summary.json", encoding="utf-8") as f:
        summary = json.load(f)
    assert summary["checks"]["hinit_lower_kl_z@gamma=0.1"]["total"] == 1
    assert "VED+HInit" in capsys.readouterr().out


def test_compare_side_by_side(tmp_path, sources_file):
    first = _train(tmp_path / "a", variant="ved-dattn")
    second = _train(tmp_path / "b", variant="ded")
    out = str(tmp_path / "compare.csv")
    assert main(["compare", "--checkpoint-a", first, "--checkpoint-b", second, "--input", sources_file,
                 "--n", "2", "--output", out]) == 0
    with open(out, encoding="utf-8") as f:
        header = f.readline().strip().split(",")
    assert header == ["source_id", "source", "sample", "A:ved-dattn", "B:ded"]


def test_log_file_receives_component_lines(tmp_path):
    log_path = tmp_path / "logs" / "run.log"
    code = main(["--log-file", str(log_path), "train", "--variant", "ved", "--output", str(tmp_path / "m")]
                + TINY_TRAIN)
    logger = logging.getLogger("vattn")
    for handler in list(logger.handlers):
        if isinstance(handler, logging.FileHandler):
            handler.close()
            logger.removeHandler(handler)
    assert code == 0
    text = log_path.read_text(encoding="utf-8")
    assert "vattn.trainer" in text
    assert text.count("Checkpoint salvo") == 1
