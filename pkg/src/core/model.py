#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Codificador-decodificador variacional com atenção determinística ou variacional
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
try:
    from .tensor import ParameterSet, Tensor, mul, sum_all
    from .gaussian import GaussianPrior, kl_to_prior, sample
    from .seq2seq import (
        DecoderState, EncoderOutput, build_params, decoder_step, embed_targets,
        encode, init_decoder, recognize_latent,
    )
    from .attention import attend, deterministic_vector, prior_for, variational_posterior
    from .objective import reconstruction_loss, total_loss
    from ..models.data_models import ModelConfig, Variant
    from ..utils.errors import ContractError
except ImportError:
    # Fallback para quando executado da raiz
    import sys
    import os
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', 'src'))
    from core.tensor import ParameterSet, Tensor, mul, sum_all
    from core.gaussian import GaussianPrior, kl_to_prior, sample
    from core.seq2seq import (
        DecoderState, EncoderOutput, build_params, decoder_step, embed_targets,
        encode, init_decoder, recognize_latent,
    )
    from core.attention import attend, deterministic_vector, prior_for, variational_posterior
    from core.objective import reconstruction_loss, total_loss
    from models.data_models import ModelConfig, Variant
    from utils.errors import ContractError


@dataclass
class LossBreakdown:
    """Termos da perda de um lote (tensores rastreados quando há registro ativo)"""
    total: Tensor
    rec: Tensor
    kl_z: Tensor
    kl_attn: Tensor
    correct: float = 0.0
    predicted: int = 0

    def to_dict(self) -> Dict[str, float]:
        return {
            "total": self.total.item(),
            "rec_loss": self.rec.item(),
            "kl_z": self.kl_z.item(),
            "kl_attn_sum": self.kl_attn.item(),
        }


@dataclass
class AttentionStep:
    """Vetor alimentado ao decodificador e o KL por linha do passo (None se determinístico)"""
    vector: Tensor
    kl: Optional[Tensor] = None
    alpha: Optional[Tensor] = None


class VariationalEncoderDecoder:
    """Modelo completo para qualquer uma das oito variantes"""

    def __init__(self, config: ModelConfig, params: Optional[ParameterSet] = None):
        self.config = config
        self.variant: Variant = config.variant
        self.params = params if params is not None else build_params(config)

    def attention_step(self, state: DecoderState, encoded: EncoderOutput,
                       prior: Optional[GaussianPrior], noise, enabled: bool = True) -> Optional[AttentionStep]:
        """
        a_j para o passo atual, consultando com o estado anterior do decodificador

        Args:
            state: Estado h_{j-1} do decodificador
            encoded: Saída do codificador
            prior: Prior da atenção (variantes VAttn)
            noise: Fonte de ruído com standard_normal(size)
            enabled: False zera o vetor (primeiro estágio do treino em 2 estágios)

        Returns:
            Optional[AttentionStep]: None para variantes sem atenção
        """
        if not self.variant.uses_attention:
            return None
        if not enabled:
            return AttentionStep(vector=Tensor(np.zeros(state.h.shape)))
        weights = attend(self.params, state.h, encoded)
        a_det = deterministic_vector(weights, encoded.states)
        if not self.variant.variational_attention:
            return AttentionStep(vector=a_det, alpha=weights.alpha)
        posterior = variational_posterior(self.params, a_det)
        kl = kl_to_prior(posterior.gaussian, prior)
        eps = noise.standard_normal(a_det.shape)
        return AttentionStep(vector=sample(posterior.gaussian, eps), kl=kl, alpha=weights.alpha)

    def forward(self, batch, noise, lambda_kl: float = 1.0, gamma_a: Optional[float] = None,
                attention_enabled: bool = True, target_in: Optional[np.ndarray] = None,
                samples: Optional[int] = None) -> LossBreakdown:
        """
        Perda de um lote com teacher forcing

        Args:
            batch: Lote (data.corpus.Batch)
            noise: Fonte de ruído para z e a_j
            lambda_kl: Peso λ_KL compartilhado pelos dois termos KL
            gamma_a: Peso da atenção (padrão: config.gamma_a)
            attention_enabled: False no primeiro estágio da variante 2-stage
            target_in: Entrada do decodificador após word dropout (padrão: batch.target_in)
            samples: Amostras reparametrizadas por sequência (padrão: config.latent_samples)

        Returns:
            LossBreakdown: termos da perda e contagem de acertos
        """
        gamma_a = self.config.gamma_a if gamma_a is None else gamma_a
        samples = self.config.latent_samples if samples is None else samples
        if samples < 1:
            raise ContractError("samples deve ser >= 1")
        target_in = batch.target_in if target_in is None else target_in
        batch_size = batch.size
        steps = batch.target_out.shape[1]

        encoded = encode(self.params, batch.source, batch.source_lengths)
        q_z = None
        kl_z = Tensor(0.0)
        if self.variant.has_latent:
            q_z = recognize_latent(self.params, encoded, self.variant)
            kl_z = mul(sum_all(kl_to_prior(q_z, GaussianPrior.standard(q_z.dim))), 1.0 / batch_size)
        prior = prior_for(self.variant, encoded) if self.variant.variational_attention else None
        embeddings = [embed_targets(self.params, target_in[:, j]) for j in range(steps)]

        rec_sum = None
        attn_sum = None
        correct = 0.0
        for _ in range(samples):
            z = sample(q_z, noise.standard_normal(q_z.mean.shape)) if q_z is not None else None
            state = init_decoder(self.params, z, encoded, self.variant)
            step_logits: List[Tensor] = []
            attn_terms: List[Tensor] = []
            for j in range(steps):
                step = self.attention_step(state, encoded, prior, noise, attention_enabled)
                logits, state = decoder_step(self.params, state, embeddings[j],
                                             step.vector if step is not None else None)
                step_logits.append(logits)
                if step is not None and step.kl is not None:
                    attn_terms.append(sum_all(mul(step.kl, batch.target_mask[:, j])))
                predicted = np.argmax(logits.values, axis=-1)
                correct += float(((predicted == batch.target_out[:, j]) * batch.target_mask[:, j]).sum())

            rec = reconstruction_loss(step_logits, batch.target_out, batch.target_mask)
            rec_sum = rec if rec_sum is None else rec_sum + rec
            if attn_terms:
                kl_a = attn_terms[0]
                for term in attn_terms[1:]:
                    kl_a = kl_a + term
                kl_a = mul(kl_a, 1.0 / batch_size)
                attn_sum = kl_a if attn_sum is None else attn_sum + kl_a

        rec = mul(rec_sum, 1.0 / samples) if samples > 1 else rec_sum
        if attn_sum is None:
            kl_attn = Tensor(0.0)
        else:
            kl_attn = mul(attn_sum, 1.0 / samples) if samples > 1 else attn_sum
        total = total_loss(rec, kl_z, kl_attn, lambda_kl, gamma_a)
        return LossBreakdown(
            total=total, rec=rec, kl_z=kl_z, kl_attn=kl_attn,
            correct=correct / samples, predicted=batch.token_count,
        )
