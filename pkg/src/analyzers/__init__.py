"""
Módulo de analisadores: métricas, gerações e o experimento de bypass
"""

from .metrics import (
    corpus_bleu,
    distinct_n,
    entropy,
    entropy_per_source,
    evaluate_generations,
    modified_precision,
    bleu_statistics,
    sampling_bleu,
    sampling_bleu_pooled,
)
from .generation_analyzer import GenerationAnalyzer, curve_evaluator, side_by_side
from .bypass_experiment import BypassExperiment, ExperimentOptions, run_variant

__all__ = [
    'corpus_bleu',
    'distinct_n',
    'entropy',
    'entropy_per_source',
    'evaluate_generations',
    'modified_precision',
    'bleu_statistics',
    'sampling_bleu',
    'sampling_bleu_pooled',
    'GenerationAnalyzer',
    'curve_evaluator',
    'side_by_side',
    'BypassExperiment',
    'ExperimentOptions',
    'run_variant',
]
