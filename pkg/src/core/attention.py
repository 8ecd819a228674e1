#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Atenção determinística e posterior/priors da atenção variacional
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
try:
    from .tensor import (
        ParameterSet, Tensor, as_tensor, batched_matvec, batched_weighted_sum,
        softmax_last_dim, tanh, transpose, matmul,
    )
    from .gaussian import DiagonalGaussian, GaussianPrior
    from .seq2seq import EncoderOutput, affine
    from ..config.settings import settings
    from ..models.data_models import Variant
    from ..utils.errors import ContractError
except ImportError:
    # Fallback para quando executado da raiz
    import sys
    import os
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', 'src'))
    from core.tensor import (
        ParameterSet, Tensor, as_tensor, batched_matvec, batched_weighted_sum,
        softmax_last_dim, tanh, transpose, matmul,
    )
    from core.gaussian import DiagonalGaussian, GaussianPrior
    from core.seq2seq import EncoderOutput, affine
    from config.settings import settings
    from models.data_models import Variant
    from utils.errors import ContractError

VARIANCE_LAYERS = ("attn_var_W", "attn_var_b", "attn_logvar_W", "attn_logvar_b")


@dataclass
class AttentionWeights:
    """α_j (B, L) e os escores pré-normalizados α̃_j"""
    alpha: Tensor
    scores: Tensor


@dataclass
class AttentionPosterior:
    """Posterior por passo; a média é o próprio vetor determinístico"""
    gaussian: DiagonalGaussian
    deterministic: Tensor


def scores(W, h_tar, states) -> Tensor:
    """
    α̃_ji = ⟨W h_j, h_i⟩ para cada posição de origem i

    Args:
        W: Matriz bilinear (H_src, H_tar)
        h_tar: Consulta do decodificador (B, H_tar)
        states: Estados de origem (B, L, H_src)

    Returns:
        Tensor: escores (B, L)
    """
    W, h_tar, states = as_tensor(W), as_tensor(h_tar), as_tensor(states)
    if W.ndim != 2 or h_tar.ndim != 2 or states.ndim != 3 \
            or W.shape != (states.shape[2], h_tar.shape[1]) or states.shape[0] != h_tar.shape[0]:
        raise ContractError(
            f"attention: W {W.shape}, consulta {h_tar.shape} e estados {states.shape} incompatíveis")
    query = matmul(h_tar, transpose(W))
    return batched_matvec(states, query)


def attention_weights(raw_scores: Tensor, mask: Optional[np.ndarray] = None) -> AttentionWeights:
    """softmax dos escores; posições preenchidas recebem peso exatamente 0"""
    masked = raw_scores
    if mask is not None and not np.all(mask):
        masked = raw_scores + settings.MASK_FILL * (1.0 - np.asarray(mask, dtype=np.float64))
    return AttentionWeights(alpha=softmax_last_dim(masked), scores=raw_scores)


def deterministic_vector(weights: AttentionWeights, states) -> Tensor:
    """a_j = Σ_i α_ji h_i"""
    return batched_weighted_sum(weights.alpha, states)


def attend(params: ParameterSet, h_tar: Tensor, encoded: EncoderOutput) -> AttentionWeights:
    raw = scores(params["attn_W"].tensor(), h_tar, encoded.states)
    return attention_weights(raw, encoded.mask)


def variational_posterior(params: ParameterSet, a_det: Tensor) -> AttentionPosterior:
    """
    μ = a_det (identidade); log σ² = affine₂(tanh(affine₁(a_det)))

    Args:
        params: Parâmetros com as camadas de variância
        a_det: Vetor determinístico de atenção (B, H)

    Returns:
        AttentionPosterior: gaussiana diagonal por linha
    """
    missing = [name for name in VARIANCE_LAYERS if name not in params]
    if missing:
        raise ContractError(f"Camadas de variância da atenção ausentes: {', '.join(missing)}")
    u = tanh(affine(params, "attn_var", a_det))
    log_var = affine(params, "attn_logvar", u)
    return AttentionPosterior(gaussian=DiagonalGaussian.from_log_var(a_det, log_var), deterministic=a_det)


def source_mean(encoded: EncoderOutput) -> Tensor:
    """h̄ = média dos estados não preenchidos; diferenciável nos estados"""
    weights = encoded.mask / encoded.lengths[:, None].astype(np.float64)
    return batched_weighted_sum(Tensor(weights), encoded.states)


def prior_for(variant: Variant, encoded: EncoderOutput) -> GaussianPrior:
    """VAttn-0: N(0, I); VAttn-hbar: N(h̄, I)"""
    hidden = int(encoded.states.shape[2])
    if variant is Variant.VED_VATTN_0:
        return GaussianPrior.standard(hidden)
    if variant is Variant.VED_VATTN_HBAR:
        return GaussianPrior.fixed_mean(source_mean(encoded))
    raise ContractError(f"{variant.label} não usa atenção variacional")
