#!/usr/bin/env python3
# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest

from core.objective import anneal_lambda, reconstruction_loss, total_loss, word_dropout
from core.tensor import Tensor
from data.vocabulary import PAD, SOS, UNK
from models.data_models import AnnealSchedule
from utils.errors import ContractError


class TestReconstruction:
    def test_uniform_logits(self):
        loss = reconstruction_loss([Tensor(np.zeros((1, 4))), Tensor(np.zeros((1, 4)))], [[1, 3]])
        assert loss.item() == pytest.approx(2 * math.log(4))
        assert loss.item() == pytest.approx(2.7726, abs=1e-4)

    def test_peaked_logits_go_to_zero(self):
        logits = np.full((1, 5), -50.0)
        logits[0, 2] = 50.0
        assert reconstruction_loss([Tensor(logits)], [[2]]).item() < 1e-12

    def test_mask_excludes_positions_and_averages_batch(self):
        steps = [Tensor(np.zeros((2, 4))) for _ in range(3)]
        mask = np.array([[1.0, 1.0, 1.0], [1.0, 0.0, 0.0]])
        loss = reconstruction_loss(steps, [[1, 2, 3], [1, 0, 0]], mask)
        assert loss.item() == pytest.approx(4 * math.log(4) / 2)

    def test_step_count_checked(self):
        with pytest.raises(ContractError):
            reconstruction_loss([Tensor(np.zeros((1, 4)))], [[1, 2]])


class TestTotalLoss:
    def test_direct_arithmetic(self):
        assert total_loss(1.0, 0.5, 2.0, 1.0, 0.1).item() == pytest.approx(1.7)

    def test_per_step_list(self):
        assert total_loss(1.0, 0.5, [0.5, 1.5], 1.0, 0.1).item() == pytest.approx(1.7)

    def test_lambda_zero_is_reconstruction(self):
        assert total_loss(1.2345, 9.0, 7.0, 0.0, 0.1).item() == 1.2345

    def test_gamma_zero_drops_attention(self):
        assert total_loss(1.0, 0.5, 100.0, 1.0, 0.0).item() == pytest.approx(1.5)

    def test_lambda_range(self):
        with pytest.raises(ContractError):
            total_loss(1.0, 0.5, 2.0, 1.5, 0.1)


class TestAnneal:
    def test_midpoint(self):
        assert anneal_lambda(AnnealSchedule(k=0.01, s0=300), 300) == 0.5

    def test_default_schedule_start(self):
        value = anneal_lambda(AnnealSchedule(k=0.0025, s0=2500), 0)
        assert value == pytest.approx(1 / (1 + math.exp(6.25)))
        assert value == pytest.approx(0.00193, abs=1e-5)

    def test_monotone_towards_one(self):
        schedule = AnnealSchedule(k=0.0025, s0=2500)
        values = [anneal_lambda(schedule, s) for s in range(0, 100_000, 500)]
        assert all(a <= b for a, b in zip(values, values[1:]))
        assert values[-1] == pytest.approx(1.0)
        assert anneal_lambda(schedule, 10 ** 9) == 1.0

    def test_negative_step(self):
        with pytest.raises(ContractError):
            anneal_lambda(AnnealSchedule(), -1)


class TestWordDropout:
    IDS = np.array([[SOS, 5, 6, 7, PAD], [SOS, 8, 9, PAD, PAD]])

    def test_rate_zero_is_identity(self, rng):
        np.testing.assert_array_equal(word_dropout(self.IDS, 0.0, rng), self.IDS)

    def test_rate_one_replaces_every_eligible_token(self, rng):
        out = word_dropout(self.IDS, 1.0, rng)
        expected = np.array([[SOS, UNK, UNK, UNK, PAD], [SOS, UNK, UNK, PAD, PAD]])
        np.testing.assert_array_equal(out, expected)

    def test_input_not_modified(self, rng):
        ids = self.IDS.copy()
        word_dropout(ids, 1.0, rng)
        np.testing.assert_array_equal(ids, self.IDS)

    def test_empirical_rate(self):
        ids = np.full((100, 1000), 7)
        out = word_dropout(ids, 0.25, np.random.default_rng(9))
        assert abs((out == UNK).mean() - 0.25) <= 0.01

    def test_rate_range(self, rng):
        with pytest.raises(ContractError):
            word_dropout(self.IDS, 1.5, rng)
