#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Analisador de Gerações - decodifica um conjunto de origens e mede qualidade e diversidade
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd
try:
    from ..config.settings import settings
    from ..core.inference import decode_map_batch, sample_many
    from ..core.model import VariationalEncoderDecoder
    from ..data.corpus import ParallelCorpus
    from ..data.vocabulary import Vocabulary, decode, decode_tokens, strip_after_eos
    from ..models.data_models import Generation, GenerationSet
    from ..utils.errors import InputError
    from .metrics import corpus_bleu, distinct_n, entropy, evaluate_generations
except ImportError:
    # Fallback para quando executado da raiz
    import sys
    import os
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', 'src'))
    from config.settings import settings
    from core.inference import decode_map_batch, sample_many
    from core.model import VariationalEncoderDecoder
    from data.corpus import ParallelCorpus
    from data.vocabulary import Vocabulary, decode, decode_tokens, strip_after_eos
    from models.data_models import Generation, GenerationSet
    from utils.errors import InputError
    from analyzers.metrics import corpus_bleu, distinct_n, entropy, evaluate_generations

CURVE_KEYS = ("val_bleu2", "val_bleu4", "val_entropy", "val_dist1")


class GenerationAnalyzer:
    def __init__(self, model: VariationalEncoderDecoder, target_vocab: Vocabulary):
        """
        Inicializa o analisador

        Args:
            model: Modelo treinado
            target_vocab: Vocabulário de destino (para detokenizar)
        """
        self.model = model
        self.target_vocab = target_vocab
        self.logger = logging.getLogger("vattn.analyzer")

    def tokens_of(self, ids: Sequence[int]) -> List[str]:
        return decode_tokens(strip_after_eos(ids), self.target_vocab)

    def text_of(self, ids: Sequence[int]) -> str:
        return decode(strip_after_eos(ids), self.target_vocab)

    def generate(self, sources: Sequence[Sequence[int]], sample_count: Optional[int] = None,
                 seed: int = settings.DEFAULT_SEED) -> List[List[Generation]]:
        """
        MAP (sample_count None) ou n amostras por origem

        Returns:
            List[List[Generation]]: gerações por origem
        """
        if sample_count is None:
            return [[Generation(tokens=ids)] for ids in decode_map_batch(self.model, sources)]
        return sample_many(self.model, sources, sample_count, seed)

    def generation_set(self, corpus: ParallelCorpus, sample_count: Optional[int] = None,
                       seed: int = settings.DEFAULT_SEED) -> GenerationSet:
        """GenerationSet com as referências do corpus"""
        generated = self.generate(corpus.sources(), sample_count, seed)
        result = GenerationSet()
        for index, (gens, target) in enumerate(zip(generated, corpus.targets())):
            result.add(index, [self.tokens_of(g.tokens) for g in gens], decode_tokens(target, self.target_vocab))
        return result

    def evaluate(self, corpus: ParallelCorpus, sample_count: int = settings.SAMPLE_COUNT,
                 seed: int = settings.DEFAULT_SEED) -> Dict[str, float]:
        """
        BLEU MAP (bleu*_map) e, na família VED, métricas das amostras

        Args:
            corpus: Conjunto de validação
            sample_count: Amostras por origem
            seed: Semente base das subsementes

        Returns:
            Dict[str, float]: métricas definidas (as indefinidas ficam ausentes)
        """
        report: Dict[str, float] = {}
        map_set = self.generation_set(corpus)
        for key, value in evaluate_generations(map_set, sampled=False).items():
            report[f"{key}_map"] = value
        if self.model.variant.has_latent:
            sampled = self.generation_set(corpus, sample_count, seed)
            undefined: List[str] = []
            report.update(evaluate_generations(sampled, sampled=True, undefined=undefined))
            if undefined:
                self.logger.warning(f"⚠️ Métricas de amostragem indefinidas, ausentes do relatório: {', '.join(undefined)}")
        return report

    def curve_point(self, corpus: ParallelCorpus, sample_count: int, seed: int) -> Dict[str, float]:
        """BLEU-2, BLEU-4, entropia e Dist-1 das gerações de validação"""
        if self.model.variant.has_latent:
            gen_set = self.generation_set(corpus, sample_count, seed)
        else:
            gen_set = self.generation_set(corpus)
        hyps = gen_set.all_hypotheses()
        refs = [ref for _, h, ref in gen_set.entries for _ in h]
        point = {
            "val_bleu2": corpus_bleu(hyps, refs, 2),
            "val_bleu4": corpus_bleu(hyps, refs, 4),
        }
        try:
            point["val_entropy"] = entropy(hyps)
            point["val_dist1"] = distinct_n(hyps, 1)
        except InputError:
            point["val_entropy"] = float('nan')
            point["val_dist1"] = float('nan')
        return point

    def to_blocks(self, generations: Sequence[Sequence[Generation]],
                  source_ids: Optional[Sequence[int]] = None) -> List[Tuple[int, List[Tuple[str, str]]]]:
        """Blocos do arquivo de gerações"""
        ids = list(source_ids) if source_ids is not None else list(range(len(generations)))
        return [(sid, [(g.tag, self.text_of(g.tokens)) for g in gens]) for sid, gens in zip(ids, generations)]


def curve_evaluator(corpus: ParallelCorpus, target_vocab: Vocabulary,
                    sample_count: int = settings.SAMPLE_COUNT, seed: int = settings.DEFAULT_SEED,
                    max_sources: int = settings.EXPERIMENT_CURVE_SOURCES):
    """Cria o avaliador por época usado pelo treinador para as curvas de validação"""
    subset = corpus.subset(range(min(max_sources, len(corpus))), "#curve")

    def evaluate(model: VariationalEncoderDecoder, epoch: int) -> Dict[str, float]:
        return GenerationAnalyzer(model, target_vocab).curve_point(subset, sample_count, seed)
    return evaluate


def side_by_side(first: GenerationAnalyzer, second: GenerationAnalyzer, sources: Sequence[Sequence[int]],
                 source_vocab: Vocabulary, sample_count: Optional[int], seed: int) -> pd.DataFrame:
    """Tabela de estudo de caso: gerações de dois modelos para as mesmas origens"""
    rows = []
    gens_a = first.generate(sources, sample_count if first.model.variant.has_latent else None, seed)
    gens_b = second.generate(sources, sample_count if second.model.variant.has_latent else None, seed)
    for index, source in enumerate(sources):
        width = max(len(gens_a[index]), len(gens_b[index]))
        for k in range(width):
            rows.append({
                "source_id": index,
                "source": decode(source, source_vocab),
                "sample": k,
                f"A:{first.model.variant.value}": first.text_of(gens_a[index][k].tokens) if k < len(gens_a[index]) else "",
                f"B:{second.model.variant.value}": second.text_of(gens_b[index][k].tokens) if k < len(gens_b[index]) else "",
            })
    return pd.DataFrame(rows)
