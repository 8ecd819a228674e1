#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Gaussianas diagonais, amostragem reparametrizada e divergência KL
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
try:
    from .tensor import Tensor, as_tensor, exp, ln, mul, sub, sum_last_dim
    from ..utils.errors import ContractError
except ImportError:
    # Fallback para quando executado da raiz
    import sys
    import os
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', 'src'))
    from core.tensor import Tensor, as_tensor, exp, ln, mul, sub, sum_last_dim
    from utils.errors import ContractError


@dataclass(frozen=True)
class DiagonalGaussian:
    """N(mean, diag(std²)); aceita vetores (d,) ou lotes (B, d)"""
    mean: Tensor
    std: Tensor
    log_var: Optional[Tensor] = None

    def __post_init__(self):
        if self.mean.shape != self.std.shape:
            raise ContractError(f"média {self.mean.shape} e desvio {self.std.shape} com formas diferentes")
        if self.log_var is not None and self.log_var.shape != self.mean.shape:
            raise ContractError(f"log-variância com forma {self.log_var.shape}, esperada {self.mean.shape}")
        if not np.all(self.std.values > 0.0):
            raise ContractError("desvio padrão deve ser estritamente positivo")

    @classmethod
    def from_log_var(cls, mean: Tensor, log_var: Tensor) -> 'DiagonalGaussian':
        """σ = exp(½ log σ²)"""
        return cls(mean=mean, std=exp(mul(log_var, 0.5)), log_var=log_var)

    @property
    def dim(self) -> int:
        return int(self.mean.shape[-1])


class PriorKind(Enum):
    """Tipos de prior"""
    STANDARD = "standard"
    FIXED_MEAN = "fixed-mean"


@dataclass(frozen=True)
class GaussianPrior:
    """Prior de covariância identidade, média zero ou fixa"""
    kind: PriorKind
    dim: int
    mean: Optional[Tensor] = None

    def __post_init__(self):
        if self.kind is PriorKind.FIXED_MEAN:
            if self.mean is None:
                raise ContractError("prior de média fixa exige vetor de média")
            if self.mean.shape[-1] != self.dim or not np.all(np.isfinite(self.mean.values)):
                raise ContractError("média do prior inválida")

    @classmethod
    def standard(cls, dim: int) -> 'GaussianPrior':
        return cls(kind=PriorKind.STANDARD, dim=dim)

    @classmethod
    def fixed_mean(cls, mean: Tensor) -> 'GaussianPrior':
        mean = as_tensor(mean)
        return cls(kind=PriorKind.FIXED_MEAN, dim=int(mean.shape[-1]), mean=mean)


def kl_to_prior(q: DiagonalGaussian, p: GaussianPrior) -> Tensor:
    """
    KL(q ‖ p) = ½ Σ_d [(μ_d − m_d)² + σ_d² − ln σ_d² − 1]

    Args:
        q: Posterior diagonal (d,) ou (B, d)
        p: Prior com covariância identidade

    Returns:
        Tensor: escalar para (d,), vetor (B,) para lotes
    """
    if q.dim != p.dim:
        raise ContractError(f"dimensões incompatíveis: posterior {q.dim}, prior {p.dim}")
    if p.kind is PriorKind.FIXED_MEAN:
        if p.mean.shape != q.mean.shape:
            raise ContractError(f"média do prior {p.mean.shape} incompatível com {q.mean.shape}")
        diff = sub(q.mean, p.mean)
    else:
        diff = q.mean
    log_var = q.log_var if q.log_var is not None else mul(ln(q.std), 2.0)
    terms = mul(diff, diff) + mul(q.std, q.std) - log_var - 1.0
    return mul(sum_last_dim(terms), 0.5)


def sample(q: DiagonalGaussian, noise) -> Tensor:
    """Amostra reparametrizada μ + σ ⊙ ε"""
    eps = as_tensor(noise)
    if eps.shape != q.mean.shape:
        raise ContractError(f"ruído com forma {eps.shape}, esperada {q.mean.shape}")
    return q.mean + mul(q.std, eps)


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Estimativa com erro padrão"""
    estimate: float
    standard_error: float

    def within(self, value: float, n_se: float = 3.0) -> bool:
        return abs(self.estimate - value) <= n_se * self.standard_error


def kl_monte_carlo(q: DiagonalGaussian, p: GaussianPrior, n: int, seed: int) -> MonteCarloEstimate:
    """
    Estimativa de Monte Carlo de KL(q ‖ p) = E_q[log q(x) − log p(x)]

    Args:
        q: Posterior de dimensão d (vetor)
        p: Prior
        n: Número de amostras (≥ 1000)
        seed: Semente do gerador

    Returns:
        MonteCarloEstimate: média e erro padrão
    """
    if n < 1000:
        raise ContractError(f"kl_monte_carlo exige n >= 1000, recebido {n}")
    if q.dim != p.dim:
        raise ContractError(f"dimensões incompatíveis: posterior {q.dim}, prior {p.dim}")
    mu = q.mean.values.reshape(-1)
    sigma = q.std.values.reshape(-1)
    prior_mean = np.zeros_like(mu) if p.mean is None else p.mean.values.reshape(-1)

    rng = np.random.default_rng(seed)
    eps = rng.standard_normal((n, mu.size))
    x = mu + sigma * eps
    # Constantes de normalização se cancelam
    log_q = np.sum(-0.5 * eps * eps - np.log(sigma), axis=1)
    log_p = np.sum(-0.5 * (x - prior_mean) ** 2, axis=1)
    diff = log_q - log_p
    return MonteCarloEstimate(
        estimate=float(diff.mean()),
        standard_error=float(diff.std(ddof=1) / math.sqrt(n)),
    )
