#!/usr/bin/env python3
# -*- coding: utf-8 -*-
import numpy as np
import pytest

from core.inference import decode_map
from core.model import VariationalEncoderDecoder
from data.vocabulary import Vocabulary
from models.data_models import Variant
from utils.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from utils.errors import CheckpointError


def _checkpoint(tiny_config, variant=Variant.VED_VATTN_HBAR):
    config = tiny_config(variant)
    vocab = Vocabulary([f"w{i}" for i in range(8)])
    model = VariationalEncoderDecoder(config)
    return Checkpoint(config=config, params=model.params, source_vocab=vocab, target_vocab=vocab, step=12, epoch=3)


def test_round_trip_preserves_decoding(tiny_config, tmp_path):
    original = _checkpoint(tiny_config)
    path = save_checkpoint(str(tmp_path / "model.ckpt"), original)
    loaded = load_checkpoint(path)
    assert loaded.config == original.config
    assert loaded.params.names() == original.params.names()
    for name, value in original.params.values().items():
        np.testing.assert_array_equal(loaded.params[name].value, value)
    assert loaded.source_vocab == original.source_vocab
    assert (loaded.step, loaded.epoch) == (12, 3)
    source = [4, 5, 6]
    assert decode_map(VariationalEncoderDecoder(loaded.config, loaded.params), source) == \
        decode_map(VariationalEncoderDecoder(original.config, original.params), source)
    assert loaded.to_bytes() == original.to_bytes()


def test_header_format(tiny_config):
    data = _checkpoint(tiny_config, Variant.DED).to_bytes()
    header = data[:data.index(b"\n")].decode("ascii").split()
    assert header[:2] == ["VATTN-CHECKPOINT", "1"]


def test_missing_file(tmp_path):
    with pytest.raises(CheckpointError):
        load_checkpoint(str(tmp_path / "nope.ckpt"))


@pytest.mark.parametrize("damage", [
    lambda data: b"GARBAGE" + data,
    lambda data: data[:-3],
    lambda data: data[:-8],
    lambda data: data.replace(b"VATTN-CHECKPOINT 1", b"VATTN-CHECKPOINT 9", 1),
    lambda data: data[:40],
])
def test_corrupt_bytes(tiny_config, damage):
    data = _checkpoint(tiny_config).to_bytes()
    with pytest.raises(CheckpointError):
        Checkpoint.from_bytes(damage(data))


def test_parameter_names_must_match_variant(tiny_config):
    checkpoint = _checkpoint(tiny_config, Variant.VED)
    checkpoint.config = tiny_config(Variant.VED_HINIT)
    with pytest.raises(CheckpointError):
        Checkpoint.from_bytes(checkpoint.to_bytes())
