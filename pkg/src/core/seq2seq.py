#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Rede portadora: embeddings, células LSTM, codificador, reconhecimento de z
e passo do decodificador alimentado por atenção
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
try:
    from .tensor import (
        ParameterSet, Tensor, as_tensor, concat_last, gather_rows, matmul, mul,
        sigmoid, slice_last, stack_steps, tanh, tile_rows,
    )
    from .gaussian import DiagonalGaussian
    from ..models.data_models import ModelConfig, Variant
    from ..utils.errors import ContractError, InputError
except ImportError:
    # Fallback para quando executado da raiz
    import sys
    import os
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', 'src'))
    from core.tensor import (
        ParameterSet, Tensor, as_tensor, concat_last, gather_rows, matmul, mul,
        sigmoid, slice_last, stack_steps, tanh, tile_rows,
    )
    from core.gaussian import DiagonalGaussian
    from models.data_models import ModelConfig, Variant
    from utils.errors import ContractError, InputError


@dataclass
class EncoderOutput:
    """Estados do codificador para um lote (B, L, H) com máscara de posições"""
    states: Tensor
    steps: List[Tensor]
    final_h: Tensor
    final_c: Tensor
    mask: np.ndarray
    lengths: np.ndarray

    @property
    def batch_size(self) -> int:
        return int(self.mask.shape[0])


@dataclass
class DecoderState:
    h: Tensor
    c: Tensor


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    bound = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=(fan_in, fan_out))


def _lstm_params(params: ParameterSet, rng: np.random.Generator, prefix: str,
                 input_dim: int, hidden: int, forget_bias: float):
    params.create(f"{prefix}_Wx", _glorot(rng, input_dim, 4 * hidden))
    params.create(f"{prefix}_Wh", _glorot(rng, hidden, 4 * hidden))
    bias = np.zeros((1, 4 * hidden))
    # Ordem das portas: [i, f, o, g]
    bias[0, hidden:2 * hidden] = forget_bias
    params.create(f"{prefix}_b", bias)


def _affine_params(params: ParameterSet, rng: np.random.Generator, prefix: str,
                   fan_in: int, fan_out: int):
    params.create(f"{prefix}_W", _glorot(rng, fan_in, fan_out))
    params.create(f"{prefix}_b", np.zeros((1, fan_out)))


def build_params(config: ModelConfig) -> ParameterSet:
    """
    Cria o conjunto de parâmetros exigido pela variante

    Args:
        config: Configuração do modelo (a semente fixa a inicialização)

    Returns:
        ParameterSet: parâmetros presentes exatamente quando a variante os usa
    """
    variant = config.variant
    E, H, Z = config.embed_dim, config.hidden_dim, config.latent_dim
    rng = np.random.default_rng(config.seed)
    params = ParameterSet()

    params.create("src_embed", _glorot(rng, config.source_vocab_size, E))
    params.create("tgt_embed", _glorot(rng, config.target_vocab_size, E))
    _lstm_params(params, rng, "enc", E, H, config.forget_bias)
    decoder_input = E + H if variant.uses_attention else E
    _lstm_params(params, rng, "dec", decoder_input, H, config.forget_bias)
    _affine_params(params, rng, "out", H, config.target_vocab_size)

    if variant.has_latent:
        _affine_params(params, rng, "z_mean", H, Z)
        _affine_params(params, rng, "z_logvar", H, Z)
    if variant.projects_latent:
        _affine_params(params, rng, "init_h", Z, H)
        _affine_params(params, rng, "init_c", Z, H)
    if variant.uses_attention:
        params.create("attn_W", _glorot(rng, H, H))
    if variant.variational_attention:
        _affine_params(params, rng, "attn_var", H, H)
        _affine_params(params, rng, "attn_logvar", H, H)
    return params


def affine(params: ParameterSet, prefix: str, x: Tensor) -> Tensor:
    """x W + b, com o bias repetido explicitamente por linha"""
    W = params[f"{prefix}_W"].tensor()
    if x.ndim != 2 or x.shape[1] != W.shape[0]:
        raise ContractError(f"{prefix}: entrada {x.shape} incompatível com peso {W.shape}")
    return matmul(x, W) + tile_rows(params[f"{prefix}_b"].tensor(), x.shape[0])


def lstm_step(params: ParameterSet, prefix: str, x: Tensor, h: Tensor, c: Tensor) -> Tuple[Tensor, Tensor]:
    """
    Um passo LSTM em lote

    Args:
        params: Parâmetros do modelo
        prefix: 'enc' ou 'dec'
        x: Entrada (B, in)
        h: Estado oculto anterior (B, H)
        c: Célula anterior (B, H)

    Returns:
        Tuple[Tensor, Tensor]: (h', c')
    """
    x, h, c = as_tensor(x), as_tensor(h), as_tensor(c)
    Wx = params[f"{prefix}_Wx"].tensor()
    Wh = params[f"{prefix}_Wh"].tensor()
    hidden = Wh.shape[0]
    if x.ndim != 2 or x.shape[1] != Wx.shape[0]:
        raise ContractError(f"{prefix}: entrada {x.shape} incompatível com {Wx.shape}")
    if h.shape != (x.shape[0], hidden) or c.shape != h.shape:
        raise ContractError(f"{prefix}: estado {h.shape}/{c.shape}, esperado {(x.shape[0], hidden)}")

    gates = matmul(x, Wx) + matmul(h, Wh) + tile_rows(params[f"{prefix}_b"].tensor(), x.shape[0])
    i = sigmoid(slice_last(gates, 0, hidden))
    f = sigmoid(slice_last(gates, hidden, 2 * hidden))
    o = sigmoid(slice_last(gates, 2 * hidden, 3 * hidden))
    g = tanh(slice_last(gates, 3 * hidden, 4 * hidden))
    c_next = mul(f, c) + mul(i, g)
    h_next = mul(o, tanh(c_next))
    return h_next, c_next


def _as_source_batch(source, lengths) -> Tuple[np.ndarray, np.ndarray]:
    ids = np.asarray(source, dtype=np.int64)
    if ids.ndim == 1:
        ids = ids.reshape(1, -1)
    if ids.ndim != 2 or ids.shape[1] == 0 or ids.shape[0] == 0:
        raise InputError("Sequência de origem vazia")
    if lengths is None:
        lengths = np.full(ids.shape[0], ids.shape[1], dtype=np.int64)
    lengths = np.asarray(lengths, dtype=np.int64).reshape(-1)
    if lengths.shape[0] != ids.shape[0] or lengths.min() < 1 or lengths.max() > ids.shape[1]:
        raise InputError("Comprimentos de origem inválidos (toda origem precisa de ao menos um token)")
    return ids, lengths


def encode(params: ParameterSet, source, lengths: Optional[Sequence[int]] = None) -> EncoderOutput:
    """
    LSTM unidirecional da esquerda para a direita sobre os tokens embutidos

    Args:
        params: Parâmetros do modelo
        source: Ids (L,) ou lote preenchido à direita (B, L)
        lengths: Comprimentos não preenchidos por linha

    Returns:
        EncoderOutput: estados por passo e estado final de cada linha
    """
    ids, lengths = _as_source_batch(source, lengths)
    batch, length = ids.shape
    hidden = params["enc_Wh"].shape[0]
    mask = (np.arange(length)[None, :] < lengths[:, None]).astype(np.float64)

    table = params["src_embed"].tensor()
    h = Tensor(np.zeros((batch, hidden)))
    c = Tensor(np.zeros((batch, hidden)))
    steps: List[Tensor] = []
    for t in range(length):
        x = gather_rows(table, ids[:, t])
        h_new, c_new = lstm_step(params, "enc", x, h, c)
        if mask[:, t].all():
            h, c = h_new, c_new
        else:
            # Posições preenchidas mantêm o estado anterior
            keep = np.repeat(mask[:, t:t + 1], hidden, axis=1)
            h = mul(h_new, keep) + mul(h, 1.0 - keep)
            c = mul(c_new, keep) + mul(c, 1.0 - keep)
        steps.append(h)
    return EncoderOutput(
        states=stack_steps(steps),
        steps=steps,
        final_h=h,
        final_c=c,
        mask=mask,
        lengths=lengths,
    )


def recognize_latent(params: ParameterSet, encoded: EncoderOutput, variant: Variant) -> DiagonalGaussian:
    """q(z|x): média e log-variância afins do estado final do codificador"""
    if not variant.has_latent:
        raise ContractError(f"{variant.label} não possui variável latente z")
    mean = affine(params, "z_mean", encoded.final_h)
    log_var = affine(params, "z_logvar", encoded.final_h)
    return DiagonalGaussian.from_log_var(mean, log_var)


def init_decoder(params: ParameterSet, z: Optional[Tensor], encoded: EncoderOutput,
                 variant: Variant) -> DecoderState:
    """
    Estado inicial do decodificador

    Família VED: projeções afins de z apenas. VED+HInit e família DED:
    estado final do codificador.
    """
    if (z is not None) != variant.has_latent:
        raise ContractError(f"{variant.label}: z deve estar presente somente na família VED")
    if variant.projects_latent:
        return DecoderState(h=affine(params, "init_h", z), c=affine(params, "init_c", z))
    return DecoderState(h=encoded.final_h, c=encoded.final_c)


def embed_targets(params: ParameterSet, ids) -> Tensor:
    return gather_rows(params["tgt_embed"].tensor(), ids)


def decoder_step(params: ParameterSet, state: DecoderState, prev_embedding: Tensor,
                 attention: Optional[Tensor] = None) -> Tuple[Tensor, DecoderState]:
    """
    h_j = LSTM(h_{j-1}, [y_{j-1}; a_j]); logits = h_j W_out + b_out

    Args:
        params: Parâmetros do modelo
        state: Estado anterior do decodificador
        prev_embedding: Embedding do token anterior (B, E)
        attention: Vetor de atenção (B, H), presente sse a variante usa atenção

    Returns:
        Tuple[Tensor, DecoderState]: logits (B, V) e novo estado
    """
    expects_attention = "attn_W" in params
    if (attention is not None) != expects_attention:
        raise ContractError("Vetor de atenção presente/ausente em desacordo com a variante")
    x = concat_last([prev_embedding, attention]) if attention is not None else prev_embedding
    h, c = lstm_step(params, "dec", x, state.h, state.c)
    logits = affine(params, "out", h)
    return logits, DecoderState(h=h, c=c)
