#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Estado de treinamento e passo Adam com recorte pela norma global
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
try:
    from .tensor import ParameterSet
    from ..config.settings import settings
    from ..utils.errors import ContractError, TrainingError
except ImportError:
    # Fallback para quando executado da raiz
    import sys
    import os
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', 'src'))
    from core.tensor import ParameterSet
    from config.settings import settings
    from utils.errors import ContractError, TrainingError


@dataclass
class TrainState:
    """Momentos do Adam, contadores e os três fluxos aleatórios independentes"""
    m: Dict[str, np.ndarray]
    v: Dict[str, np.ndarray]
    noise_rng: np.random.Generator
    dropout_rng: np.random.Generator
    shuffle_rng: np.random.Generator
    step: int = 0
    epoch: int = 0
    lr: float = settings.LEARNING_RATE
    last_grad_norm: float = 0.0

    @classmethod
    def create(cls, params: ParameterSet, seed: int, lr: float = settings.LEARNING_RATE) -> 'TrainState':
        noise_seq, dropout_seq, shuffle_seq = np.random.SeedSequence(seed).spawn(3)
        return cls(
            m={p.name: np.zeros_like(p.value) for p in params},
            v={p.name: np.zeros_like(p.value) for p in params},
            noise_rng=np.random.default_rng(noise_seq),
            dropout_rng=np.random.default_rng(dropout_seq),
            shuffle_rng=np.random.default_rng(shuffle_seq),
            lr=lr,
        )


def global_norm(grads: Dict[str, np.ndarray]) -> float:
    return math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))


def adam_step(
    state: TrainState,
    params: ParameterSet,
    grads: Optional[Dict[str, np.ndarray]] = None,
    lr: Optional[float] = None,
    beta1: float = settings.ADAM_BETA1,
    beta2: float = settings.ADAM_BETA2,
    eps: float = settings.ADAM_EPSILON,
    clip_norm: Optional[float] = None,
) -> float:
    """
    Atualiza os parâmetros no lugar com Adam e correção de viés

    Args:
        state: Estado com os momentos (avança state.step)
        params: Parâmetros a atualizar
        grads: Gradientes por nome (padrão: acumuladores dos parâmetros)
        lr: Taxa de aprendizado (padrão: state.lr)
        beta1, beta2, eps: Hiperparâmetros do Adam
        clip_norm: Norma global máxima aplicada antes do passo (None desativa)

    Returns:
        float: norma global dos gradientes antes do recorte
    """
    grads = params.gradients() if grads is None else grads
    lr = state.lr if lr is None else lr
    for param in params:
        grad = grads.get(param.name)
        if grad is None or grad.shape != param.shape:
            raise ContractError(f"Gradiente ausente ou com forma errada para {param.name}")
        if not np.all(np.isfinite(grad)):
            raise TrainingError(f"Gradiente não finito em {param.name}",
                                {"parameter": param.name, "step": state.step})

    norm = global_norm(grads)
    scale = 1.0
    if clip_norm is not None and norm > clip_norm:
        scale = clip_norm / norm

    state.step += 1
    bc1 = 1.0 - beta1 ** state.step
    bc2 = 1.0 - beta2 ** state.step
    for param in params:
        g = grads[param.name] * scale if scale != 1.0 else grads[param.name]
        m = state.m[param.name]
        v = state.v[param.name]
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * (g * g)
        param.value -= lr * (m / bc1) / (np.sqrt(v / bc2) + eps)
    state.last_grad_norm = norm
    return norm
