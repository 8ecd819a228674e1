#!/usr/bin/env python3
# -*- coding: utf-8 -*-
import numpy as np
import pytest

from core.attention import (
    AttentionWeights, attend, attention_weights, deterministic_vector, prior_for, scores, source_mean,
    variational_posterior,
)
from core.gaussian import PriorKind, kl_to_prior, sample
from core.seq2seq import EncoderOutput, build_params, encode
from core.tensor import ComputationRecord, Tensor, sum_all
from models.data_models import Variant
from utils.errors import ContractError


def _encoder_output(states):
    states = np.asarray(states, dtype=np.float64)
    batch, length, hidden = states.shape
    zeros = Tensor(np.zeros((batch, hidden)))
    return EncoderOutput(
        states=Tensor(states), steps=[], final_h=zeros, final_c=zeros,
        mask=np.ones((batch, length)), lengths=np.full(batch, length),
    )


class TestScores:
    def test_zero_matrix_is_uniform(self, rng):
        states = rng.normal(size=(1, 4, 3))
        raw = scores(np.zeros((3, 3)), rng.normal(size=(1, 3)), states)
        np.testing.assert_array_equal(raw.values, np.zeros((1, 4)))
        np.testing.assert_allclose(attention_weights(raw).alpha.values, np.full((1, 4), 0.25))

    def test_identity_on_orthonormal_states(self):
        states = np.eye(3)[None, :, :]
        raw = scores(np.eye(3), [[0.0, 1.0, 0.0]], states)
        np.testing.assert_array_equal(raw.values, [[0.0, 1.0, 0.0]])

    def test_bilinear_in_query(self, rng):
        W, h, states = rng.normal(size=(3, 3)), rng.normal(size=(1, 3)), rng.normal(size=(1, 5, 3))
        np.testing.assert_allclose(scores(W, 2.5 * h, states).values, 2.5 * scores(W, h, states).values)

    def test_shape_checked(self):
        with pytest.raises(ContractError):
            scores(np.eye(2), np.ones((1, 3)), np.ones((1, 4, 3)))

    def test_padded_positions_get_zero_weight(self, rng):
        raw = Tensor(rng.normal(size=(2, 3)))
        alpha = attention_weights(raw, np.array([[1.0, 1.0, 1.0], [1.0, 0.0, 0.0]])).alpha.values
        assert alpha[1, 1] == 0.0 and alpha[1, 2] == 0.0
        np.testing.assert_allclose(alpha.sum(axis=1), [1.0, 1.0])


class TestDeterministicVector:
    def test_one_hot_selects_state(self, rng):
        states = rng.normal(size=(1, 3, 4))
        weights = AttentionWeights(alpha=Tensor([[0.0, 1.0, 0.0]]), scores=Tensor(np.zeros((1, 3))))
        np.testing.assert_array_equal(deterministic_vector(weights, states).values, states[:, 1, :])

    def test_uniform_is_mean(self, rng):
        states = rng.normal(size=(1, 4, 2))
        weights = AttentionWeights(alpha=Tensor(np.full((1, 4), 0.25)), scores=Tensor(np.zeros((1, 4))))
        np.testing.assert_allclose(deterministic_vector(weights, states).values, states.mean(axis=1))

    def test_convex_combination(self, rng):
        for _ in range(1000):
            batch, length, hidden = rng.integers(1, 4), rng.integers(1, 9), rng.integers(1, 6)
            states = rng.normal(size=(batch, length, hidden))
            mask = (rng.random((batch, length)) < 0.7).astype(np.float64)
            mask[:, 0] = 1.0
            weights = attention_weights(Tensor(5.0 * rng.normal(size=(batch, length))), mask)
            alpha = weights.alpha.values
            assert np.all(np.abs(alpha.sum(axis=1) - 1.0) <= 1e-12)
            assert np.all(alpha >= 0.0) and np.all(alpha[mask == 0.0] == 0.0)

            a = deterministic_vector(weights, states).values
            np.testing.assert_allclose(a, np.einsum("bl,blh->bh", alpha, states), atol=1e-12)
            valid = np.where(mask[:, :, None] == 1.0, states, np.nan)
            assert np.all(a <= np.nanmax(valid, axis=1) + 1e-12)
            assert np.all(a >= np.nanmin(valid, axis=1) - 1e-12)


class TestVariationalPosterior:
    def test_mean_is_deterministic_vector(self, tiny_config):
        params = build_params(tiny_config(Variant.VED_VATTN_0))
        enc = encode(params, [4, 5, 6])
        a_det = deterministic_vector(attend(params, enc.final_h, enc), enc.states)
        posterior = variational_posterior(params, a_det)
        assert posterior.gaussian.mean is a_det
        np.testing.assert_array_equal(posterior.gaussian.mean.values, a_det.values)

    def test_zero_variance_layers_give_unit_std(self, tiny_config, rng):
        params = build_params(tiny_config(Variant.VED_VATTN_0))
        for name in ("attn_var_W", "attn_var_b", "attn_logvar_W", "attn_logvar_b"):
            params[name].value[...] = 0.0
        posterior = variational_posterior(params, Tensor(rng.normal(size=(2, 5))))
        np.testing.assert_array_equal(posterior.gaussian.std.values, np.ones((2, 5)))

    def test_requires_variance_layers(self, tiny_config):
        params = build_params(tiny_config(Variant.VED_DATTN))
        with pytest.raises(ContractError):
            variational_posterior(params, Tensor(np.zeros((1, 5))))

    def test_sample_reaches_variance_layers(self, tiny_config):
        params = build_params(tiny_config(Variant.VED_VATTN_0))
        with ComputationRecord() as record:
            enc = encode(params, [4, 5, 6])
            a_det = deterministic_vector(attend(params, enc.final_h, enc), enc.states)
            posterior = variational_posterior(params, a_det)
            record.backward(sum_all(sample(posterior.gaussian, np.ones(a_det.shape))))
        assert np.abs(params["attn_logvar_W"].grad).sum() > 0.0
        assert np.abs(params["attn_var_W"].grad).sum() > 0.0


class TestPrior:
    def test_single_step_mean(self, tiny_config):
        params = build_params(tiny_config(Variant.VED_VATTN_HBAR))
        enc = encode(params, [7])
        prior = prior_for(Variant.VED_VATTN_HBAR, enc)
        assert prior.kind is PriorKind.FIXED_MEAN
        np.testing.assert_allclose(prior.mean.values, enc.states.values[:, 0, :])

    def test_opposite_states_cancel(self):
        v = np.array([0.5, -1.0, 2.0])
        enc = _encoder_output([[v, -v]])
        np.testing.assert_array_equal(source_mean(enc).values, np.zeros((1, 3)))

    def test_masked_mean_ignores_padding(self, tiny_config):
        params = build_params(tiny_config(Variant.VED_VATTN_HBAR))
        enc = encode(params, [[4, 5, 6], [7, 8, 0]], lengths=[3, 2])
        expected = enc.states.values[1, :2, :].mean(axis=0)
        np.testing.assert_allclose(source_mean(enc).values[1], expected)

    def test_standard_for_vattn_zero(self, tiny_config):
        params = build_params(tiny_config(Variant.VED_VATTN_0))
        assert prior_for(Variant.VED_VATTN_0, encode(params, [4, 5])).kind is PriorKind.STANDARD

    def test_rejects_non_variational_variants(self, tiny_config):
        params = build_params(tiny_config(Variant.VED_DATTN))
        with pytest.raises(ContractError):
            prior_for(Variant.VED_DATTN, encode(params, [4]))

    def test_hbar_kl_reaches_encoder(self, tiny_config):
        params = build_params(tiny_config(Variant.VED_VATTN_HBAR))
        with ComputationRecord() as record:
            enc = encode(params, [4, 5, 6])
            a_det = deterministic_vector(attend(params, enc.final_h, enc), enc.states)
            posterior = variational_posterior(params, a_det)
            record.backward(sum_all(kl_to_prior(posterior.gaussian, prior_for(Variant.VED_VATTN_HBAR, enc))))
        assert np.abs(params["enc_Wx"].grad).sum() > 0.0
