#!/usr/bin/env python3
# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest

from core.gaussian import DiagonalGaussian, GaussianPrior, PriorKind, kl_monte_carlo, kl_to_prior, sample
from core.tensor import Tensor
from utils.errors import ContractError


def gaussian(mean, std):
    return DiagonalGaussian(mean=Tensor(mean), std=Tensor(std))


class TestKL:
    def test_identical_to_standard(self):
        assert kl_to_prior(gaussian([0.0, 0.0], [1.0, 1.0]), GaussianPrior.standard(2)).item() == 0.0

    def test_shifted_mean(self):
        kl = kl_to_prior(gaussian([1.0, 0.0], [1.0, 1.0]), GaussianPrior.standard(2))
        assert kl.item() == pytest.approx(0.5)

    def test_fixed_mean_prior(self):
        m = [0.3, -1.2, 2.0]
        prior = GaussianPrior.fixed_mean(m)
        assert prior.kind is PriorKind.FIXED_MEAN
        assert kl_to_prior(gaussian(m, [1.0, 1.0, 1.0]), prior).item() == pytest.approx(0.0, abs=1e-15)

    def test_wide_posterior_closed_form(self):
        kl = kl_to_prior(gaussian([0.0], [math.exp(0.5)]), GaussianPrior.standard(1))
        assert kl.item() == pytest.approx((math.e - 2.0) / 2.0)

    def test_batch_gives_one_value_per_row(self):
        q = gaussian([[0.0, 0.0], [1.0, 0.0]], [[1.0, 1.0], [1.0, 1.0]])
        np.testing.assert_allclose(kl_to_prior(q, GaussianPrior.standard(2)).values, [0.0, 0.5])

    def test_dimension_mismatch(self):
        with pytest.raises(ContractError):
            kl_to_prior(gaussian([0.0, 0.0], [1.0, 1.0]), GaussianPrior.standard(3))

    def test_nonnegative_for_random_posteriors(self, rng):
        for _ in range(20):
            q = gaussian(rng.normal(size=4), np.exp(rng.normal(size=4)))
            assert kl_to_prior(q, GaussianPrior.standard(4)).item() >= 0.0


class TestConstruction:
    def test_std_must_be_positive(self):
        with pytest.raises(ContractError):
            gaussian([0.0], [0.0])

    def test_from_zero_log_var(self):
        q = DiagonalGaussian.from_log_var(Tensor([0.5, 1.0]), Tensor([0.0, 0.0]))
        np.testing.assert_array_equal(q.std.values, [1.0, 1.0])

    def test_fixed_mean_requires_finite_mean(self):
        with pytest.raises(ContractError):
            GaussianPrior.fixed_mean([np.nan, 0.0])


class TestSample:
    def test_zero_noise_is_mean(self):
        q = gaussian([0.25, -3.0], [2.0, 0.5])
        np.testing.assert_array_equal(sample(q, np.zeros(2)).values, [0.25, -3.0])

    def test_direct_formula(self):
        assert sample(gaussian([0.0], [2.0]), [1.5]).values[0] == 3.0

    def test_noise_shape_checked(self):
        with pytest.raises(ContractError):
            sample(gaussian([0.0, 0.0], [1.0, 1.0]), np.zeros(3))

    def test_empirical_moments(self):
        n = 100_000
        q = gaussian(np.full((n, 1), 0.5), np.full((n, 1), 2.0))
        draws = sample(q, np.random.default_rng(5).standard_normal((n, 1))).values.reshape(-1)
        mean_se = 2.0 / math.sqrt(n)
        var_se = 4.0 * math.sqrt(2.0 / (n - 1))
        assert abs(draws.mean() - 0.5) <= 3 * mean_se
        assert abs(draws.var(ddof=1) - 4.0) <= 3 * var_se


class TestMonteCarlo:
    def test_zero_divergence(self):
        est = kl_monte_carlo(gaussian([0.0, 0.0], [1.0, 1.0]), GaussianPrior.standard(2), 100_000, seed=1)
        assert abs(est.estimate) < 1e-12 or est.within(0.0)

    def test_shifted_mean(self):
        est = kl_monte_carlo(gaussian([1.0, 0.0], [1.0, 1.0]), GaussianPrior.standard(2), 100_000, seed=2)
        assert est.within(0.5)

    def test_wide_posterior(self):
        q = gaussian([0.0], [math.exp(0.5)])
        est = kl_monte_carlo(q, GaussianPrior.standard(1), 100_000, seed=3)
        assert est.within((math.e - 2.0) / 2.0)

    def test_agrees_with_closed_form_for_fixed_mean(self):
        q = gaussian([0.4, -0.1], [0.8, 1.3])
        prior = GaussianPrior.fixed_mean([0.1, 0.2])
        est = kl_monte_carlo(q, prior, 200_000, seed=4)
        assert est.within(kl_to_prior(q, prior).item())

    @pytest.mark.slow
    @pytest.mark.parametrize("kind", list(PriorKind))
    def test_closed_form_agrees_on_random_sweep(self, kind):
        rng = np.random.default_rng(2024)
        misses = 0
        for case in range(100):
            q = gaussian(rng.uniform(-2.0, 2.0, 3), rng.uniform(0.1, 5.0, 3))
            if kind is PriorKind.STANDARD:
                prior = GaussianPrior.standard(3)
            else:
                prior = GaussianPrior.fixed_mean(rng.uniform(-2.0, 2.0, 3))
            exact = kl_to_prior(q, prior).item()
            est = kl_monte_carlo(q, prior, 1_000_000, seed=case)
            assert est.within(exact, n_se=5.0), (case, exact, est)
            misses += not est.within(exact)
        # 3 erros padrão cobrem 99,7% dos casos
        assert misses <= 3

    def test_requires_enough_samples(self):
        with pytest.raises(ContractError):
            kl_monte_carlo(gaussian([0.0], [1.0]), GaussianPrior.standard(1), 999, seed=0)
