#!/usr/bin/env python3
# -*- coding: utf-8 -*-
import numpy as np
import pytest

from data.corpus import (generate_synthetic, generate_token_pairs, iterate_batches, load_sources,
                         load_tsv, make_batch, parse_tsv_lines, template_targets)
from data.vocabulary import EOS, PAD, SOS, decode_tokens
from models.data_models import SyntheticTaskSpec, TaskKind
from utils.errors import ContractError, InputError, ParseError


def test_reverse_targets():
    spec = SyntheticTaskSpec(task=TaskKind.REVERSE, vocab_size=6, min_length=2, max_length=4,
                             pair_count=20, seed=3)
    for source, target in generate_token_pairs(spec):
        assert target == source[::-1]
        assert 2 <= len(source) <= 4


def test_copy_targets():
    spec = SyntheticTaskSpec(task="copy", vocab_size=5, pair_count=5)
    assert all(s == t for s, t in generate_token_pairs(spec))


def test_one_to_many_targets_come_from_templates():
    spec = SyntheticTaskSpec(task=TaskKind.ONE_TO_MANY, vocab_size=8, min_length=3, max_length=5,
                             pair_count=60, templates_per_source=3, seed=1)
    targets_by_source = {}
    for source, target in generate_token_pairs(spec):
        assert target in template_targets(source, 3)
        targets_by_source.setdefault(tuple(source), set()).add(tuple(target))
    assert all(len(t) <= 3 for t in targets_by_source.values())
    assert any(len(t) >= 2 for t in targets_by_source.values())


def test_templates():
    assert template_targets(["c", "a", "b"], 4) == [
        ["b", "a", "c"], ["a", "b", "c"], ["c", "a", "c", "a"], ["a", "b", "c"]]
    with pytest.raises(ContractError):
        template_targets(["a"], 1)


def test_synthetic_is_deterministic():
    spec = SyntheticTaskSpec(vocab_size=10, pair_count=30, seed=9)
    first, second = generate_synthetic(spec), generate_synthetic(spec)
    assert first.pairs == second.pairs
    assert first.provenance == second.provenance
    other = generate_synthetic(SyntheticTaskSpec(vocab_size=10, pair_count=30, seed=10))
    assert other.pairs != first.pairs


def test_spec_key_value_round_trip():
    spec = SyntheticTaskSpec(task="one-to-many", vocab_size=7, pair_count=12, seed=4)
    assert SyntheticTaskSpec.from_key_value(spec.to_key_value()) == spec


def test_parse_tsv_line():
    assert parse_tsv_lines(["a b\tc d"]) == [(["a", "b"], ["c", "d"])]


@pytest.mark.parametrize("lines, number", [
    (["a b\tc", "no tab here"], 2),
    (["a\tb", ""], 2),
    (["\tb"], 1),
    (["a\tb\tc"], 1),
])
def test_parse_errors_carry_line_number(lines, number):
    with pytest.raises(ParseError) as info:
        parse_tsv_lines(lines, "corpus.tsv")
    assert info.value.line_number == number
    assert f"corpus.tsv:{number}" in str(info.value)


def test_load_tsv_with_crlf(tmp_path):
    path = tmp_path / "pairs.tsv"
    path.write_bytes(b"a b\tb a\r\nc\tc\r\n")
    corpus = load_tsv(str(path))
    assert len(corpus) == 2
    assert decode_tokens(corpus.pairs[0][1], corpus.target_vocab) == ["b", "a"]
    assert corpus.provenance == "file:pairs.tsv"
    assert load_sources(str(path), corpus.source_vocab) == corpus.sources()


def test_load_empty_file(tmp_path):
    path = tmp_path / "empty.tsv"
    path.write_text("")
    with pytest.raises(InputError):
        load_tsv(str(path))


def test_split_is_seeded_and_disjoint(toy_corpus):
    train, held = toy_corpus.split(1, seed=3)
    again_train, again_held = toy_corpus.split(1, seed=3)
    assert held.pairs == again_held.pairs and train.pairs == again_train.pairs
    assert len(train) == 3 and len(held) == 1
    assert held.pairs[0] not in train.pairs
    with pytest.raises(ContractError):
        toy_corpus.split(4)


def test_to_tsv_round_trip(toy_corpus, tmp_path):
    path = toy_corpus.to_tsv(str(tmp_path / "toy.tsv"))
    loaded = load_tsv(path, (toy_corpus.source_vocab, toy_corpus.target_vocab))
    assert loaded.pairs == toy_corpus.pairs


def test_make_batch_layout():
    batch = make_batch([([4, 5, 6], [7]), ([8], [9, 10])])
    np.testing.assert_array_equal(batch.source, [[4, 5, 6], [8, PAD, PAD]])
    np.testing.assert_array_equal(batch.source_lengths, [3, 1])
    np.testing.assert_array_equal(batch.target_in, [[SOS, 7, PAD], [SOS, 9, 10]])
    np.testing.assert_array_equal(batch.target_out, [[7, EOS, PAD], [9, 10, EOS]])
    np.testing.assert_array_equal(batch.target_mask, [[1, 1, 0], [1, 1, 1]])
    assert batch.token_count == 5


def test_iterate_batches_in_order(toy_corpus):
    batches = list(iterate_batches(toy_corpus, 3, order=[3, 1, 0, 2]))
    assert [b.indices for b in batches] == [[3, 1, 0], [2]]
    with pytest.raises(ContractError):
        list(iterate_batches(toy_corpus, 0))
