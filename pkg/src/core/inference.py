#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Decodificação MAP e por amostragem (seleção de tokens sempre gulosa)
"""

from typing import List, Optional, Sequence

import numpy as np
try:
    from .model import VariationalEncoderDecoder
    from .gaussian import sample
    from .seq2seq import decoder_step, embed_targets, encode, init_decoder, recognize_latent
    from .attention import prior_for
    from ..data.vocabulary import EOS, PAD, SOS
    from ..models.data_models import DecodeMode, DecodeRequest, Generation
    from ..utils.errors import ContractError, InputError
except ImportError:
    # Fallback para quando executado da raiz
    import sys
    import os
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', 'src'))
    from core.model import VariationalEncoderDecoder
    from core.gaussian import sample
    from core.seq2seq import decoder_step, embed_targets, encode, init_decoder, recognize_latent
    from core.attention import prior_for
    from data.vocabulary import EOS, PAD, SOS
    from models.data_models import DecodeMode, DecodeRequest, Generation
    from utils.errors import ContractError, InputError

DECODE_CHUNK = 256


class ZeroNoise:
    """Fonte de ruído identicamente nula (ε = 0 em todo lugar)"""

    def standard_normal(self, size) -> np.ndarray:
        return np.zeros(size)


class StackedNoise:
    """Um gerador por linha do lote; a linha b consome apenas o seu fluxo"""

    def __init__(self, generators: Sequence[np.random.Generator]):
        self.generators = list(generators)

    @classmethod
    def from_subseeds(cls, subseeds: Sequence[int]) -> 'StackedNoise':
        return cls([np.random.default_rng(int(s)) for s in subseeds])

    def standard_normal(self, size) -> np.ndarray:
        rows, width = size
        if rows != len(self.generators):
            raise ContractError(f"Ruído para {rows} linhas com {len(self.generators)} geradores")
        return np.stack([g.standard_normal(width) for g in self.generators])


def sample_subseeds(seed: int, n: int, stream: int = 0) -> List[int]:
    """Subsementes das n amostras do fluxo `stream` (ex.: índice da origem)"""
    state = np.random.SeedSequence([int(seed), int(stream)]).generate_state(n)
    return [int(s) for s in state]


def _greedy_rows(model: VariationalEncoderDecoder, sources: Sequence[Sequence[int]], noise,
                 max_lengths: Sequence[int]) -> List[List[int]]:
    params, variant = model.params, model.variant
    lengths = np.array([len(s) for s in sources], dtype=np.int64)
    if lengths.size == 0 or lengths.min() < 1:
        raise InputError("Decodificação exige origens não vazias")
    ids = np.full((len(sources), int(lengths.max())), PAD, dtype=np.int64)
    for row, src in enumerate(sources):
        ids[row, :len(src)] = src

    encoded = encode(params, ids, lengths)
    z = None
    if variant.has_latent:
        q_z = recognize_latent(params, encoded, variant)
        z = sample(q_z, noise.standard_normal(q_z.mean.shape))
    state = init_decoder(params, z, encoded, variant)
    prior = prior_for(variant, encoded) if variant.variational_attention else None

    outputs: List[List[int]] = [[] for _ in sources]
    done = np.zeros(len(sources), dtype=bool)
    prev = np.full(len(sources), SOS, dtype=np.int64)
    for _ in range(int(max(max_lengths))):
        step = model.attention_step(state, encoded, prior, noise)
        logits, state = decoder_step(params, state, embed_targets(params, prev),
                                     step.vector if step is not None else None)
        # argmax devolve o primeiro máximo: empate resolvido pelo menor id
        chosen = np.argmax(logits.values, axis=-1)
        for row, token in enumerate(chosen):
            if done[row]:
                continue
            outputs[row].append(int(token))
            if token == EOS or len(outputs[row]) >= max_lengths[row]:
                done[row] = True
        if done.all():
            break
        prev = chosen
    return outputs


def _max_length(model: VariationalEncoderDecoder, source: Sequence[int], max_length: Optional[int]) -> int:
    if max_length is not None:
        if max_length < 1:
            raise ContractError("max_length deve ser >= 1")
        return max_length
    return model.config.decode_length(len(source))


def decode_map(model: VariationalEncoderDecoder, source: Sequence[int],
               max_length: Optional[int] = None) -> List[int]:
    """
    Decodificação MAP: z := μ_z, a_j := μ_{a_j}, token argmax a cada passo

    Returns:
        List[int]: ids gerados, terminando em EOS ou com exatamente max_length tokens
    """
    return _greedy_rows(model, [list(source)], ZeroNoise(), [_max_length(model, source, max_length)])[0]


def decode_map_batch(model: VariationalEncoderDecoder, sources: Sequence[Sequence[int]],
                     max_length: Optional[int] = None) -> List[List[int]]:
    """decode_map para várias origens, em blocos"""
    outputs: List[List[int]] = []
    for start in range(0, len(sources), DECODE_CHUNK):
        chunk = [list(s) for s in sources[start:start + DECODE_CHUNK]]
        limits = [_max_length(model, s, max_length) for s in chunk]
        outputs.extend(_greedy_rows(model, chunk, ZeroNoise(), limits))
    return outputs


def decode_sample(model: VariationalEncoderDecoder, source: Sequence[int], n: int, seed: int,
                  stream: int = 0, max_length: Optional[int] = None, noise=None) -> List[Generation]:
    """
    n decodificações com z (e a_j, nas variantes VAttn) sorteados dos posteriors

    Args:
        model: Modelo treinado (família VED)
        source: Ids de origem
        n: Número de amostras (>= 1)
        seed: Semente base
        stream: Índice do fluxo (a origem dentro de um conjunto)
        max_length: Limite de tokens (padrão: 2·|x| + 5)
        noise: Fonte de ruído substituta (ex.: ZeroNoise) no lugar das subsementes

    Returns:
        List[Generation]: saídas na ordem de sorteio, cada uma com sua subsemente
    """
    if not model.variant.has_latent:
        raise ContractError(f"Amostragem indisponível para {model.variant.label} (sem variáveis latentes)")
    if n < 1:
        raise ContractError("n deve ser >= 1")
    subseeds = sample_subseeds(seed, n, stream)
    source_noise = noise if noise is not None else StackedNoise.from_subseeds(subseeds)
    limit = _max_length(model, source, max_length)
    rows = _greedy_rows(model, [list(source)] * n, source_noise, [limit] * n)
    return [Generation(tokens=tokens, subseed=s) for tokens, s in zip(rows, subseeds)]


def sample_many(model: VariationalEncoderDecoder, sources: Sequence[Sequence[int]], n: int,
                seed: int, max_length: Optional[int] = None) -> List[List[Generation]]:
    """
    Amostras para várias origens em lote; a origem i usa o fluxo i,
    com o mesmo resultado de decode_sample(..., stream=i)
    """
    if not model.variant.has_latent:
        raise ContractError(f"Amostragem indisponível para {model.variant.label} (sem variáveis latentes)")
    rows, seeds, limits, owners = [], [], [], []
    for index, source in enumerate(sources):
        subseeds = sample_subseeds(seed, n, index)
        limit = _max_length(model, source, max_length)
        for subseed in subseeds:
            rows.append(list(source))
            seeds.append(subseed)
            limits.append(limit)
            owners.append(index)

    results: List[List[Generation]] = [[] for _ in sources]
    for start in range(0, len(rows), DECODE_CHUNK):
        end = start + DECODE_CHUNK
        noise = StackedNoise.from_subseeds(seeds[start:end])
        decoded = _greedy_rows(model, rows[start:end], noise, limits[start:end])
        for offset, tokens in enumerate(decoded):
            results[owners[start + offset]].append(Generation(tokens=tokens, subseed=seeds[start + offset]))
    return results


def run_request(model: VariationalEncoderDecoder, request: DecodeRequest) -> List[Generation]:
    """Executa um DecodeRequest (MAP ignora sample_count)"""
    if request.mode is DecodeMode.MAP:
        return [Generation(tokens=decode_map(model, request.source, request.max_length))]
    return decode_sample(model, request.source, request.sample_count, request.seed,
                         max_length=request.max_length)
