#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Métricas de qualidade e diversidade: BLEU de corpus (sacrebleu), entropia de unigramas e Dist-n
"""

import math
from collections import Counter
from functools import partial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from nltk.util import ngrams
from sacrebleu.metrics import BLEU
from sacrebleu.metrics.bleu import BLEUScore
try:
    from ..models.data_models import GenerationSet
    from ..utils.errors import ContractError, InputError
except ImportError:
    # Fallback para quando executado da raiz
    import sys
    import os
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', 'src'))
    from models.data_models import GenerationSet
    from utils.errors import ContractError, InputError

Tokens = Sequence[str]


def ngram_counts(tokens: Tokens, n: int) -> Counter:
    return Counter(ngrams(tokens, n))


def _bleu_model(max_n: int) -> BLEU:
    # Tokens já separados por espaço; sem suavização, ordem sem acertos zera a pontuação
    return BLEU(tokenize="none", smooth_method="none", max_ngram_order=max_n, force=True)


def bleu_statistics(hypotheses: Sequence[Tokens], references: Sequence[Tokens], max_n: int = 4) -> BLEUScore:
    """
    Estatísticas de BLEU de corpus do sacrebleu (contagens, totais, bp, score em 0..100)

    Args:
        hypotheses: Hipóteses tokenizadas
        references: Referências alinhadas (uma por origem)
        max_n: Ordem máxima (1..4)

    Returns:
        BLEUScore: resultado do sacrebleu
    """
    if not 1 <= max_n <= 4:
        raise ContractError(f"max_n deve estar em 1..4, recebido {max_n}")
    if not hypotheses:
        raise InputError("Corpus vazio para BLEU")
    if len(hypotheses) != len(references):
        raise InputError(f"{len(hypotheses)} hipóteses para {len(references)} referências")
    hyps = [" ".join(h) for h in hypotheses]
    refs = [" ".join(r) for r in references]
    return _bleu_model(max_n).corpus_score(hyps, [refs])


def modified_precision(hypotheses: Sequence[Tokens], references: Sequence[Tokens], n: int) -> Tuple[int, int]:
    """Contagens de n-gramas recortadas pela referência: (acertos, total da hipótese)"""
    stats = bleu_statistics(hypotheses, references, n)
    return int(stats.counts[n - 1]), int(stats.totals[n - 1])


def corpus_bleu(hypotheses: Sequence[Tokens], references: Sequence[Tokens], max_n: int = 4) -> float:
    """
    BLEU de corpus com uma referência por origem

    Args:
        hypotheses: Hipóteses tokenizadas
        references: Referências alinhadas
        max_n: Ordem máxima (1..4); média geométrica das ordens 1..max_n

    Returns:
        float: pontuação em [0, 1]; 0 se alguma ordem não tem acertos
    """
    stats = bleu_statistics(hypotheses, references, max_n)
    if any(count == 0 for count in stats.counts[:max_n]):
        return 0.0
    return stats.score / 100.0


def entropy(sequences: Sequence[Tokens]) -> float:
    """−Σ p(w) ln p(w) com p por frequência relativa no conjunto de tokens"""
    counts = Counter(token for seq in sequences for token in seq)
    total = sum(counts.values())
    if total == 0:
        raise InputError("Conjunto de tokens vazio para entropia")
    value = -sum((c / total) * math.log(c / total) for c in counts.values())
    return value if value > 0.0 else 0.0


def entropy_per_source(groups: Sequence[Sequence[Tokens]]) -> float:
    """Entropia das amostras de cada origem, média entre origens com tokens"""
    values = [entropy(group) for group in groups if any(len(seq) for seq in group)]
    if not values:
        raise InputError("Nenhuma origem com tokens gerados")
    return sum(values) / len(values)


def distinct_n(sequences: Sequence[Tokens], n: int) -> float:
    """Fração de n-gramas únicos sobre o total do conjunto"""
    if n < 1:
        raise ContractError(f"n deve ser >= 1, recebido {n}")
    grams: Counter = Counter()
    for seq in sequences:
        grams.update(ngram_counts(seq, n))
    total = sum(grams.values())
    if total == 0:
        raise InputError(f"Nenhuma sequência com ao menos {n} tokens")
    return len(grams) / total


def sampling_bleu(generations: GenerationSet, max_n: int) -> float:
    """Média sobre as n amostras do BLEU de corpus de cada amostra"""
    references = generations.references()
    count = generations.sample_count
    if count == 0:
        raise InputError("Conjunto de gerações vazio")
    return sum(corpus_bleu(generations.hypotheses_at(k), references, max_n) for k in range(count)) / count


def sampling_bleu_pooled(generations: GenerationSet, max_n: int) -> float:
    """BLEU de corpus com todas as amostras reunidas (referência repetida)"""
    hyps: List[List[str]] = []
    refs: List[List[str]] = []
    for _, hypotheses, reference in generations.entries:
        for hyp in hypotheses:
            hyps.append(hyp)
            refs.append(reference)
    return corpus_bleu(hyps, refs, max_n)


def evaluate_generations(generations: GenerationSet, sampled: bool,
                         undefined: Optional[List[str]] = None) -> Dict[str, float]:
    """
    Métricas de um conjunto de gerações

    Args:
        generations: Gerações por origem com referência
        sampled: True para amostras (relatório completo); False para MAP (apenas BLEU)
        undefined: Se informado, recebe os nomes das métricas indefinidas, que ficam fora do
                   relatório; sem ele, a primeira métrica indefinida levanta InputError

    Returns:
        Dict[str, float]: bleu1..bleu4 e, para amostras, entropias, dist1, dist2 e bleu2_pooled
    """
    if len(generations) == 0:
        raise InputError("Conjunto de gerações vazio")
    metrics: Dict[str, Callable[[], float]] = {}
    if not sampled:
        hyps = generations.hypotheses_at(0)
        refs = generations.references()
        for n in range(1, 5):
            metrics[f"bleu{n}"] = partial(corpus_bleu, hyps, refs, n)
    else:
        pool = generations.all_hypotheses()
        for n in range(1, 5):
            metrics[f"bleu{n}"] = partial(sampling_bleu, generations, n)
        metrics["bleu2_pooled"] = partial(sampling_bleu_pooled, generations, 2)
        metrics["entropy_corpus"] = partial(entropy, pool)
        metrics["entropy_per_source_avg"] = partial(entropy_per_source, generations.groups())
        metrics["dist1"] = partial(distinct_n, pool, 1)
        metrics["dist2"] = partial(distinct_n, pool, 2)

    report: Dict[str, float] = {}
    for name, compute in metrics.items():
        try:
            report[name] = compute()
        except InputError:
            if undefined is None:
                raise
            undefined.append(name)
    return report
