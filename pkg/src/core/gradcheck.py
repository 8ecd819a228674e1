#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Verificação de gradientes por diferenças finitas centrais
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np
try:
    from .tensor import ComputationRecord, ParameterSet, Tensor
    from ..utils.errors import ContractError
except ImportError:
    # Fallback para quando executado da raiz
    import sys
    import os
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', 'src'))
    from core.tensor import ComputationRecord, ParameterSet, Tensor
    from utils.errors import ContractError

LossFunction = Callable[[ParameterSet], Tensor]
GradientHook = Callable[[Dict[str, np.ndarray]], Dict[str, np.ndarray]]


@dataclass
class GradCheckEntry:
    """Resultado da verificação de um parâmetro"""
    name: str
    max_relative_error: float
    checked_elements: int
    worst_index: int
    passed: bool

    def to_dict(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "max_relative_error": self.max_relative_error,
            "checked_elements": self.checked_elements,
            "worst_index": self.worst_index,
            "passed": self.passed,
        }


@dataclass
class GradCheckReport:
    """Relatório por parâmetro de uma verificação de gradiente"""
    step: float
    tolerance: float
    entries: List[GradCheckEntry] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def failures(self) -> List[GradCheckEntry]:
        return [e for e in self.entries if not e.passed]

    @property
    def max_relative_error(self) -> float:
        return max((e.max_relative_error for e in self.entries), default=0.0)

    def to_lines(self) -> List[str]:
        lines = []
        for e in self.entries:
            status = "ok" if e.passed else "FAIL"
            lines.append(f"{e.name} max_rel_err={e.max_relative_error:.3e} "
                         f"checked={e.checked_elements} status={status}")
        return lines


def _evaluate(f: LossFunction, params: ParameterSet) -> float:
    value = f(params)
    if value.size != 1:
        raise ContractError(f"A função verificada deve ser escalar, forma {value.shape}")
    return float(value.values.reshape(-1)[0])


def relative_error(analytic: float, numeric: float, abs_floor: float) -> float:
    denom = max(abs(analytic), abs(numeric), abs_floor)
    return abs(analytic - numeric) / denom


def grad_check(
    f: LossFunction,
    params: ParameterSet,
    step: float = 1e-5,
    tolerance: float = 1e-5,
    max_elements: Optional[int] = None,
    abs_floor: float = 1e-4,
    seed: int = 0,
    gradient_hook: Optional[GradientHook] = None,
) -> GradCheckReport:
    """
    Compara o gradiente reverso com diferenças centrais (f(θ+h) − f(θ−h)) / 2h

    Args:
        f: Função escalar dos parâmetros; deve ser determinística
        params: Parâmetros a verificar (restaurados ao final)
        step: Passo h > 0
        tolerance: Erro relativo máximo aceito
        max_elements: Limite de elementos sondados por parâmetro (None = todos)
        abs_floor: Piso do denominador do erro relativo
        seed: Semente da escolha de elementos
        gradient_hook: Transformação aplicada ao gradiente analítico (injeção de falhas)

    Returns:
        GradCheckReport: erro relativo máximo por parâmetro
    """
    if step <= 0:
        raise ContractError(f"Passo h deve ser positivo, recebido {step}")

    params.zero_grad()
    with ComputationRecord() as record:
        loss = f(params)
        record.backward(loss)
    baseline = float(loss.values.reshape(-1)[0])

    # Pré-condição: f determinística
    if _evaluate(f, params) != baseline:
        raise ContractError("A função verificada não é determinística (aleatoriedade sem semente?)")

    analytic = {name: grad.copy() for name, grad in params.gradients().items()}
    if gradient_hook is not None:
        analytic = gradient_hook(analytic)

    rng = np.random.default_rng(seed)
    report = GradCheckReport(step=step, tolerance=tolerance)
    for param in params:
        flat_grad = analytic[param.name].reshape(-1)
        size = flat_grad.size
        if max_elements is None or size <= max_elements:
            indices = np.arange(size)
        else:
            chosen = rng.choice(size, size=max_elements - 1, replace=False)
            indices = np.unique(np.append(chosen, int(np.argmax(np.abs(flat_grad)))))

        flat_value = param.value.reshape(-1)
        worst, worst_index = 0.0, -1
        for index in indices:
            original = flat_value[index]
            flat_value[index] = original + step
            plus = _evaluate(f, params)
            flat_value[index] = original - step
            minus = _evaluate(f, params)
            flat_value[index] = original
            numeric = (plus - minus) / (2.0 * step)
            error = relative_error(float(flat_grad[index]), numeric, abs_floor)
            if error > worst or worst_index < 0:
                worst, worst_index = error, int(index)

        report.entries.append(GradCheckEntry(
            name=param.name,
            max_relative_error=worst,
            checked_elements=int(len(indices)),
            worst_index=worst_index,
            passed=worst <= tolerance,
        ))
    params.zero_grad()
    return report
