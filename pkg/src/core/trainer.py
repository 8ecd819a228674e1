#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Laço de treinamento: lotes embaralhados, teacher forcing com word dropout,
annealing de λ_KL, Adam com decaimento por época e heurística de 2 estágios
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np
try:
    from .tensor import ComputationRecord, ParameterSet
    from .model import VariationalEncoderDecoder
    from .objective import anneal_lambda, word_dropout
    from .optimizer import TrainState, adam_step
    from ..data.corpus import ParallelCorpus, iterate_batches
    from ..models.data_models import EpochMetrics, ModelConfig
    from ..utils.errors import InputError, TrainingError
    from ..utils.logger import setup_logger
except ImportError:
    # Fallback para quando executado da raiz
    import sys
    import os
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', 'src'))
    from core.tensor import ComputationRecord, ParameterSet
    from core.model import VariationalEncoderDecoder
    from core.objective import anneal_lambda, word_dropout
    from core.optimizer import TrainState, adam_step
    from data.corpus import ParallelCorpus, iterate_batches
    from models.data_models import EpochMetrics, ModelConfig
    from utils.errors import InputError, TrainingError
    from utils.logger import setup_logger

# Recebe o modelo e a época (1-based) e devolve métricas extras da curva
EpochEvaluator = Callable[[VariationalEncoderDecoder, int], Dict[str, float]]


@dataclass
class TrainResult:
    model: VariationalEncoderDecoder
    history: List[EpochMetrics] = field(default_factory=list)
    state: Optional[TrainState] = None

    @property
    def params(self) -> ParameterSet:
        return self.model.params

    @property
    def final(self) -> Optional[EpochMetrics]:
        return self.history[-1] if self.history else None


class VEDTrainer:
    """Treina uma variante sobre um corpus paralelo"""

    def __init__(self, config: ModelConfig, model: Optional[VariationalEncoderDecoder] = None,
                 logger_name: str = "vattn.trainer"):
        self.config = config
        self.model = model if model is not None else VariationalEncoderDecoder(config)
        self.state = TrainState.create(self.model.params, config.seed, config.learning_rate)
        self.logger = setup_logger(logger_name)

    def attention_enabled(self, epoch_index: int) -> bool:
        """Na variante 2-stage a atenção é zerada nas primeiras épocas"""
        return not (self.config.variant.two_stage and epoch_index < self.config.two_stage_epochs)

    def _abort(self, message: str, epoch: int, lambda_kl: float, values: Dict[str, float]):
        diagnostics = {"epoch": epoch, "step": self.state.step, "lambda_kl": lambda_kl}
        diagnostics.update(values)
        self.logger.error(f"❌ Treinamento divergiu: {message}")
        raise TrainingError(message, diagnostics)

    def train_epoch(self, corpus: ParallelCorpus, epoch_index: int) -> EpochMetrics:
        """
        Uma época completa

        Args:
            corpus: Corpus de treino
            epoch_index: Índice 0-based (define lr e o estágio)

        Returns:
            EpochMetrics: médias ponderadas pelo tamanho dos lotes
        """
        config = self.config
        params = self.model.params
        self.state.epoch = epoch_index
        self.state.lr = config.learning_rate * config.lr_decay ** epoch_index
        enabled = self.attention_enabled(epoch_index)

        order = self.state.shuffle_rng.permutation(len(corpus))
        sums = {"rec_loss": 0.0, "kl_z": 0.0, "kl_attn_sum": 0.0, "total": 0.0}
        seen = 0
        correct = 0.0
        predicted = 0
        lambda_sum = 0.0
        lambda_kl = anneal_lambda(config.schedule, self.state.step)
        for batch in iterate_batches(corpus, config.batch_size, order):
            lambda_kl = anneal_lambda(config.schedule, self.state.step)
            target_in = word_dropout(batch.target_in, config.word_dropout, self.state.dropout_rng)
            params.zero_grad()
            with ComputationRecord() as record:
                losses = self.model.forward(batch, self.state.noise_rng, lambda_kl,
                                            attention_enabled=enabled, target_in=target_in)
                values = losses.to_dict()
                if not all(math.isfinite(v) for v in values.values()):
                    self._abort("perda não finita", epoch_index + 1, lambda_kl, values)
                record.backward(losses.total)
            try:
                adam_step(self.state, params, lr=self.state.lr, clip_norm=config.clip_norm)
            except TrainingError as e:
                self._abort(str(e), epoch_index + 1, lambda_kl, values)

            for key in sums:
                sums[key] += values[key] * batch.size
            lambda_sum += lambda_kl * batch.size
            seen += batch.size
            correct += losses.correct
            predicted += losses.predicted

        return EpochMetrics(
            epoch=epoch_index + 1,
            step=self.state.step,
            lr=self.state.lr,
            lambda_kl=lambda_sum / seen,
            rec_loss=sums["rec_loss"] / seen,
            kl_z=sums["kl_z"] / seen,
            kl_attn_sum=sums["kl_attn_sum"] / seen,
            total=sums["total"] / seen,
            accuracy=correct / predicted if predicted else float('nan'),
        )

    def train(self, corpus: ParallelCorpus, evaluator: Optional[EpochEvaluator] = None,
              on_epoch: Optional[Callable[[EpochMetrics], None]] = None) -> TrainResult:
        """
        Treina por config.epochs épocas

        Args:
            corpus: Corpus de treino não vazio
            evaluator: Métricas de validação por época (curvas)
            on_epoch: Chamado com as métricas de cada época

        Returns:
            TrainResult: modelo treinado e histórico por época
        """
        if len(corpus) == 0:
            raise InputError("Corpus de treino vazio")
        self.logger.info(f"🚀 Treinando {self.config.variant.label}: {len(corpus)} pares, "
                         f"{self.config.epochs} épocas, semente {self.config.seed}")
        history: List[EpochMetrics] = []
        for epoch_index in range(self.config.epochs):
            metrics = self.train_epoch(corpus, epoch_index)
            if evaluator is not None:
                metrics.curves.update(evaluator(self.model, metrics.epoch))
            history.append(metrics)
            self.logger.info(metrics.to_line())
            if on_epoch is not None:
                on_epoch(metrics)
        return TrainResult(model=self.model, history=history, state=self.state)


def train(config: ModelConfig, corpus: ParallelCorpus, evaluator: Optional[EpochEvaluator] = None) -> TrainResult:
    """Atalho funcional: cria o treinador e treina"""
    return VEDTrainer(config).train(corpus, evaluator=evaluator)
