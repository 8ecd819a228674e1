#!/usr/bin/env python3
# -*- coding: utf-8 -*-
import math

import pytest

from analyzers.metrics import (bleu_statistics, corpus_bleu, distinct_n, entropy, entropy_per_source,
                               evaluate_generations, modified_precision, ngram_counts, sampling_bleu,
                               sampling_bleu_pooled)
from models.data_models import GenerationSet
from utils.errors import ContractError, InputError


def _set():
    generations = GenerationSet()
    generations.add(0, [["a", "b"], ["c", "d"]], ["a", "b"])
    generations.add(1, [["c", "d"], ["c", "d"]], ["c", "d"])
    return generations


def test_clipped_unigram_precision():
    hyp = "the the the the the the the".split()
    ref = "the cat is on the mat".split()
    assert modified_precision([hyp], [ref], 1) == (2, 7)
    assert corpus_bleu([hyp], [ref], 1) == pytest.approx(2 / 7, abs=1e-9)


def test_perfect_match_scores_one():
    hyps = [["a", "b", "c", "d"], ["e", "f", "g", "h", "i"]]
    for n in range(1, 5):
        assert corpus_bleu(hyps, hyps, n) == pytest.approx(1.0, abs=1e-9)


def test_brevity_penalty_applied():
    hyp = [["the", "cat"]]
    ref = [["the", "cat", "sat", "on", "mat"]]
    assert bleu_statistics(hyp, ref, 1).bp == pytest.approx(math.exp(1 - 5 / 2), abs=1e-12)
    assert corpus_bleu(hyp, ref, 1) == pytest.approx(math.exp(1 - 5 / 2), abs=1e-9)
    longer = [["the", "cat", "sat", "on", "the", "mat"]]
    assert bleu_statistics(longer, ref, 1).bp == 1.0
    assert bleu_statistics([[]], ref, 1).bp == 0.0
    assert corpus_bleu([[]], ref, 1) == 0.0


def test_bleu_zero_and_errors():
    assert corpus_bleu([["x", "y"]], [["a", "b"]], 2) == 0.0
    assert corpus_bleu([["a"]], [["a"]], 2) == 0.0
    with pytest.raises(ContractError):
        corpus_bleu([["a"]], [["a"]], 5)
    with pytest.raises(InputError):
        corpus_bleu([], [], 1)
    with pytest.raises(InputError):
        corpus_bleu([["a"]], [["a"], ["b"]], 1)


def test_two_sentence_corpus_oracle():
    hyps = [["a", "b", "c"], ["d", "e"]]
    refs = [["a", "b", "d"], ["d", "e", "f"]]
    # unigramas 4/5, bigramas 2/3, c=5, r=6
    expected = math.exp(1 - 6 / 5) * math.sqrt((4 / 5) * (2 / 3))
    assert modified_precision(hyps, refs, 2) == (2, 3)
    assert corpus_bleu(hyps, refs, 2) == pytest.approx(expected, abs=1e-9)


def test_entropy_values():
    assert entropy([["a", "a", "a"]]) == 0.0
    assert entropy([["a", "b"], ["c", "d"]]) == pytest.approx(math.log(4), abs=1e-12)
    assert entropy([["a", "a", "b"]]) == pytest.approx(-(2 / 3) * math.log(2 / 3) - (1 / 3) * math.log(1 / 3), abs=1e-12)
    with pytest.raises(InputError):
        entropy([[], []])


def test_entropy_per_source_average():
    groups = [[["a", "b"], ["c", "d"]], [["c", "d"], ["c", "d"]], [[]]]
    assert entropy_per_source(groups) == pytest.approx((math.log(4) + math.log(2)) / 2)


def test_distinct_n():
    assert distinct_n([["a", "a", "b"]], 1) == pytest.approx(2 / 3, abs=1e-12)
    assert distinct_n([["a", "a", "b"]], 2) == 1.0
    assert distinct_n([["a"], ["a"], ["a"]], 1) == pytest.approx(1 / 3, abs=1e-12)
    assert ngram_counts(["a", "b", "a", "b"], 2) == {("a", "b"): 2, ("b", "a"): 1}
    with pytest.raises(InputError):
        distinct_n([["a"]], 2)
    with pytest.raises(ContractError):
        distinct_n([["a"]], 0)


def test_sampling_bleu_variants():
    generations = _set()
    assert sampling_bleu(generations, 1) == pytest.approx(0.75)
    assert sampling_bleu(generations, 2) == pytest.approx(0.75)
    assert sampling_bleu_pooled(generations, 2) == pytest.approx(0.75)


def test_evaluate_generations_keys():
    generations = _set()
    map_report = evaluate_generations(generations, sampled=False)
    assert sorted(map_report) == ["bleu1", "bleu2", "bleu3", "bleu4"]
    assert map_report["bleu1"] == pytest.approx(1.0, abs=1e-9)
    sampled = evaluate_generations(generations, sampled=True)
    assert sampled["entropy_corpus"] == pytest.approx(entropy([["a", "b"], ["c", "d"], ["c", "d"], ["c", "d"]]))
    assert sampled["entropy_per_source_avg"] == pytest.approx((math.log(4) + math.log(2)) / 2)
    assert sampled["dist1"] == pytest.approx(4 / 8)
    assert sampled["dist2"] == pytest.approx(2 / 4)
    with pytest.raises(InputError):
        evaluate_generations(GenerationSet(), sampled=True)


def test_undefined_sampled_metrics_left_out():
    generations = GenerationSet()
    generations.add(0, [[], []], ["a", "b"])
    undefined = []
    report = evaluate_generations(generations, sampled=True, undefined=undefined)
    assert undefined == ["entropy_corpus", "entropy_per_source_avg", "dist1", "dist2"]
    assert sorted(report) == ["bleu1", "bleu2", "bleu2_pooled", "bleu3", "bleu4"]
    assert all(value == 0.0 for value in report.values())
    with pytest.raises(InputError):
        evaluate_generations(generations, sampled=True)
