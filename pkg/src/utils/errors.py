#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Hierarquia de exceções do VAttn Toolkit
"""

from typing import Any, Dict, Optional


class VAttnError(Exception):
    """Erro base de todo o sistema"""


class DimensionError(VAttnError, ValueError):
    """Formas (shapes) incompatíveis entre tensores"""

    def __init__(self, operation: str, *shapes: tuple):
        self.operation = operation
        self.shapes = shapes
        formatted = " x ".join(str(tuple(s)) for s in shapes)
        super().__init__(f"{operation}: dimensões incompatíveis {formatted}")


class DomainError(VAttnError, ValueError):
    """Valor fora do domínio da operação (ex.: ln de valor não positivo)"""


class ContractError(VAttnError):
    """Pré-condição ou contrato de uso violado"""


class InputError(VAttnError, ValueError):
    """Entrada vazia, desalinhada ou inválida"""


class ParseError(InputError):
    """Erro de leitura de arquivo com número de linha"""

    def __init__(self, message: str, line_number: Optional[int] = None, path: Optional[str] = None):
        self.line_number = line_number
        self.path = path
        location = ""
        if path:
            location += f"{path}"
        if line_number is not None:
            location += f":{line_number}" if path else f"linha {line_number}"
        super().__init__(f"{location}: {message}" if location else message)


class TrainingError(VAttnError, RuntimeError):
    """Falha durante o treinamento (gradiente ou perda não finitos)"""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        self.diagnostics = dict(diagnostics or {})
        if self.diagnostics:
            details = " ".join(f"{k}={v}" for k, v in self.diagnostics.items())
            message = f"{message} [{details}]"
        super().__init__(message)


class UsageError(VAttnError):
    """Uso incorreto da linha de comando"""


class CheckpointError(VAttnError):
    """Checkpoint ausente ou corrompido"""
