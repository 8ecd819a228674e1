#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Módulo de Utilitários - logging, erros, arquivos e cache
"""

from .logger import attach_log_file, setup_logger
from .errors import (
    VAttnError,
    DimensionError,
    DomainError,
    ContractError,
    InputError,
    ParseError,
    TrainingError,
    UsageError,
    CheckpointError,
)
from .file_utils import FileUtils
from .cache_manager import RunCache, run_key

__all__ = [
    'setup_logger',
    'attach_log_file',
    'VAttnError',
    'DimensionError',
    'DomainError',
    'ContractError',
    'InputError',
    'ParseError',
    'TrainingError',
    'UsageError',
    'CheckpointError',
    'FileUtils',
    'RunCache',
    'run_key',
]
