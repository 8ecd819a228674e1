#!/usr/bin/env python3
# -*- coding: utf-8 -*-
import math

import pytest

from models.data_models import (DecodeRequest, EpochMetrics, ExperimentReport, GenerationSet,
                                ModelConfig, SyntheticTaskSpec, Variant, VariantResult)
from utils.errors import ContractError, InputError, UsageError


def test_variant_parse_accepts_value_and_label():
    assert Variant.parse("ved-vattn-hbar") is Variant.VED_VATTN_HBAR
    assert Variant.parse("VED+HInit") is Variant.VED_HINIT
    with pytest.raises(UsageError) as info:
        Variant.parse("ved-vattn")
    assert "ved-vattn-0" in str(info.value)


def test_variant_capabilities():
    assert not Variant.DED.has_latent and not Variant.DED.uses_attention
    assert Variant.VED_HINIT.init_from_encoder and not Variant.VED_HINIT.projects_latent
    assert Variant.VED.projects_latent
    assert Variant.VED_VATTN_0.variational_attention and Variant.VED_VATTN_0.uses_attention
    assert not Variant.VED_DATTN.variational_attention
    assert [v for v in Variant if v.two_stage] == [Variant.VED_DATTN_2STAGE]


def test_config_validation(tiny_config):
    with pytest.raises(ContractError):
        tiny_config(Variant.VED, hidden_dim=0)
    with pytest.raises(ContractError):
        tiny_config(Variant.VED, word_dropout=1.5)
    with pytest.raises(ContractError):
        tiny_config(Variant.VED, gamma_a=-0.1)
    with pytest.raises(ContractError):
        tiny_config(Variant.VED, kl_k=-1.0).schedule


def test_config_dict_round_trip(tiny_config):
    config = tiny_config("ved-dattn", max_decode_length=9)
    assert config.variant is Variant.VED_DATTN
    assert ModelConfig.from_dict(config.to_dict()) == config
    assert config.decode_length(4) == 9
    assert tiny_config(Variant.VED).decode_length(4) == 13


def test_task_spec_validation():
    with pytest.raises(UsageError):
        SyntheticTaskSpec(task="shuffle")
    with pytest.raises(ContractError):
        SyntheticTaskSpec(min_length=5, max_length=3)
    with pytest.raises(ContractError):
        SyntheticTaskSpec(task="one-to-many", templates_per_source=1)


def test_decode_request_defaults():
    request = DecodeRequest(source=[4, 5], mode="sampling", sample_count=2)
    assert request.sample_count == 2
    with pytest.raises(ContractError):
        DecodeRequest(source=[4], sample_count=0)


def test_epoch_metrics_line():
    metrics = EpochMetrics(epoch=2, step=10, lr=0.005, lambda_kl=0.25, rec_loss=1.5, kl_z=0.5,
                           kl_attn_sum=0.0, total=1.625, accuracy=0.5, curves={"val_bleu2": 0.125})
    assert metrics.to_line() == ("epoch=2 step=10 lr=0.005 lambda_kl=0.25 rec_loss=1.5 kl_z=0.5 "
                                 "kl_attn_sum=0 total=1.625 accuracy=0.5 val_bleu2=0.125")


def test_generation_set_rejects_empty_source():
    generations = GenerationSet()
    with pytest.raises(InputError):
        generations.add(0, [], ["a"])


def test_variant_result_round_trip():
    result = VariantResult(variant=Variant.VED_VATTN_0, seed=3, gamma_a=0.1,
                           metrics={"bleu2": 0.5, "kl_z": 1.0}, curves=[{"epoch": 1}], checkpoint="x.ckpt")
    row = result.to_dict()
    assert row["label"] == "VED+VAttn-0"
    assert math.isnan(row["dist1"])
    assert not result.is_finite()
    again = VariantResult.from_dict(row)
    assert again.variant is Variant.VED_VATTN_0
    assert again.metrics["bleu2"] == 0.5 and again.checkpoint == "x.ckpt"
    report = ExperimentReport(seed=3, gamma_a=0.1, task="one-to-many", rows=[result])
    assert report.row(Variant.VED_VATTN_0) is result
    assert report.row(Variant.DED) is None
