#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Objetivo de treinamento: reconstrução, KL ponderado, annealing e word dropout
"""

import math
from typing import Optional, Sequence, Union

import numpy as np
try:
    from .tensor import Tensor, as_tensor, log_softmax_last_dim, mul, neg, pick_last, sum_all
    from ..data.vocabulary import PAD, SOS, UNK
    from ..models.data_models import AnnealSchedule
    from ..utils.errors import ContractError
except ImportError:
    # Fallback para quando executado da raiz
    import sys
    import os
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', 'src'))
    from core.tensor import Tensor, as_tensor, log_softmax_last_dim, mul, neg, pick_last, sum_all
    from data.vocabulary import PAD, SOS, UNK
    from models.data_models import AnnealSchedule
    from utils.errors import ContractError

Scalar = Union[Tensor, float]


def reconstruction_loss(step_logits: Sequence[Tensor], targets, mask: Optional[np.ndarray] = None) -> Tensor:
    """
    Σ_j −ln softmax(logits_j)[y_j], somado nos passos e médio no lote

    Args:
        step_logits: Logits por passo, cada um (B, V)
        targets: Ids de destino (B, T) com T = número de passos
        mask: (B, T); posições 0 ficam fora da soma

    Returns:
        Tensor: perda escalar
    """
    targets = np.asarray(targets, dtype=np.int64)
    if targets.ndim == 1:
        targets = targets.reshape(1, -1)
    if len(step_logits) != targets.shape[1]:
        raise ContractError(f"{len(step_logits)} passos de logits para {targets.shape[1]} alvos")
    if mask is None:
        mask = np.ones(targets.shape)
    batch = targets.shape[0]
    total = None
    for j, logits in enumerate(step_logits):
        if logits.shape[0] != batch:
            raise ContractError(f"Passo {j}: lote {logits.shape[0]}, esperado {batch}")
        picked = pick_last(log_softmax_last_dim(logits), targets[:, j])
        term = sum_all(mul(picked, mask[:, j]))
        total = term if total is None else total + term
    return mul(neg(total), 1.0 / batch)


def total_loss(rec: Scalar, kl_z: Scalar, kl_attn: Union[Scalar, Sequence[Scalar]],
               lambda_kl: float, gamma_a: float) -> Tensor:
    """J = rec + λ·[kl_z + γ_a·Σ_j kl_a_j]"""
    if not 0.0 <= lambda_kl <= 1.0:
        raise ContractError(f"λ_KL deve estar em [0, 1], recebido {lambda_kl}")
    if isinstance(kl_attn, (list, tuple)):
        attn_sum = as_tensor(0.0)
        for term in kl_attn:
            attn_sum = attn_sum + term
    else:
        attn_sum = as_tensor(kl_attn)
    if lambda_kl == 0.0:
        return as_tensor(rec)
    return as_tensor(rec) + mul(as_tensor(kl_z) + mul(attn_sum, gamma_a), lambda_kl)


def anneal_lambda(schedule: AnnealSchedule, step: int) -> float:
    """Logística 1 / (1 + exp(−k(step − s₀))), avaliada sem overflow"""
    if step < 0:
        raise ContractError(f"step deve ser >= 0, recebido {step}")
    x = schedule.k * (step - schedule.s0)
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def word_dropout(ids, rate: float, rng: np.random.Generator) -> np.ndarray:
    """
    Troca cada token de entrada do decodificador (exceto SOS e PAD) por UNK com probabilidade rate

    Args:
        ids: Ids de entrada do decodificador
        rate: Taxa em [0, 1]
        rng: Gerador dedicado ao dropout

    Returns:
        np.ndarray: cópia com as substituições
    """
    if not 0.0 <= rate <= 1.0:
        raise ContractError(f"rate deve estar em [0, 1], recebido {rate}")
    ids = np.array(ids, dtype=np.int64, copy=True)
    draws = rng.random(ids.shape)
    eligible = (ids != SOS) & (ids != PAD)
    ids[eligible & (draws < rate)] = UNK
    return ids
