"""
Modelos de dados do VAttn Toolkit
"""

from .data_models import (
    Variant,
    AnnealSchedule,
    ModelConfig,
    TaskKind,
    SyntheticTaskSpec,
    DecodeMode,
    DecodeRequest,
    Generation,
    EpochMetrics,
    GenerationSet,
    VariantResult,
    ExperimentReport,
    REPORT_FIELDS,
)

__all__ = [
    'Variant',
    'AnnealSchedule',
    'ModelConfig',
    'TaskKind',
    'SyntheticTaskSpec',
    'DecodeMode',
    'DecodeRequest',
    'Generation',
    'EpochMetrics',
    'GenerationSet',
    'VariantResult',
    'ExperimentReport',
    'REPORT_FIELDS',
]
