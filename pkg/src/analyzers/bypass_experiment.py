#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Experimento de bypass: treina as variantes VED sobre os mesmos dados e sementes
e compara KL de z, diversidade das amostras e BLEU
"""

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd
try:
    from ..config.settings import settings
    from ..core.trainer import VEDTrainer
    from ..data.corpus import generate_synthetic
    from ..models.data_models import (
        ExperimentReport, ModelConfig, SyntheticTaskSpec, TaskKind, Variant, VariantResult,
    )
    from ..utils.cache_manager import RunCache, run_key
    from ..utils.checkpoint import Checkpoint, save_checkpoint
    from ..utils.errors import ContractError
    from ..utils.file_utils import FileUtils
    from ..utils.logger import setup_logger
    from .generation_analyzer import GenerationAnalyzer, curve_evaluator
except ImportError:
    # Fallback para quando executado da raiz
    import sys
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', 'src'))
    from config.settings import settings
    from core.trainer import VEDTrainer
    from data.corpus import generate_synthetic
    from models.data_models import (
        ExperimentReport, ModelConfig, SyntheticTaskSpec, TaskKind, Variant, VariantResult,
    )
    from utils.cache_manager import RunCache, run_key
    from utils.checkpoint import Checkpoint, save_checkpoint
    from utils.errors import ContractError
    from utils.file_utils import FileUtils
    from utils.logger import setup_logger
    from analyzers.generation_analyzer import GenerationAnalyzer, curve_evaluator

DATTN = Variant.VED_DATTN
VATTN_VARIANTS = (Variant.VED_VATTN_HBAR, Variant.VED_VATTN_0)


@dataclass
class ExperimentOptions:
    """Parâmetros do experimento (padrões de settings.EXPERIMENT_*)"""
    variants: List[Variant] = field(default_factory=lambda: [Variant.parse(v) for v in settings.EXPERIMENT_VARIANTS])
    seeds: List[int] = field(default_factory=lambda: [settings.DEFAULT_SEED])
    gamma_values: List[float] = field(default_factory=lambda: [settings.GAMMA_A])
    task: SyntheticTaskSpec = field(default_factory=lambda: SyntheticTaskSpec(
        task=TaskKind.ONE_TO_MANY,
        max_length=settings.EXPERIMENT_MAX_LEN,
        pair_count=settings.EXPERIMENT_PAIRS,
    ))
    heldout: int = settings.EXPERIMENT_HELDOUT
    epochs: int = settings.EXPERIMENT_EPOCHS
    batch_size: int = settings.EXPERIMENT_BATCH
    embed_dim: int = settings.EMBED_DIM
    hidden_dim: int = settings.HIDDEN_DIM
    latent_dim: int = settings.LATENT_DIM
    learning_rate: float = settings.LEARNING_RATE
    lr_decay: float = settings.LR_DECAY
    word_dropout: float = settings.WORD_DROPOUT
    kl_k: Optional[float] = None
    kl_s0: Optional[float] = None
    sample_count: int = settings.SAMPLE_COUNT
    curve_sources: int = settings.EXPERIMENT_CURVE_SOURCES
    workers: int = settings.CONCURRENT_RUNS
    force: bool = settings.FORCE_RETRAIN
    output_dir: str = settings.OUTPUT_DIR
    save_checkpoints: bool = True

    def __post_init__(self):
        if self.task.task is not TaskKind.ONE_TO_MANY:
            raise ContractError("O experimento de bypass exige a tarefa one-to-many")
        if not self.variants or not self.seeds or not self.gamma_values:
            raise ContractError("variants, seeds e gamma_values não podem ser vazios")

    def anneal(self, train_size: int) -> Dict[str, float]:
        """Agenda explícita, ou escalada ao total de passos previsto"""
        if self.kl_k is not None and self.kl_s0 is not None:
            return {"kl_k": self.kl_k, "kl_s0": self.kl_s0}
        total_steps = max(1, self.epochs * math.ceil(train_size / self.batch_size))
        return {
            "kl_k": self.kl_k if self.kl_k is not None else settings.ANNEAL_AUTO_SPAN / total_steps,
            "kl_s0": self.kl_s0 if self.kl_s0 is not None else settings.ANNEAL_AUTO_MIDPOINT * total_steps,
        }


def run_variant(job: Dict[str, Any]) -> Dict[str, Any]:
    """
    Treina e avalia uma variante (função de nível de módulo para rodar em processos)

    Args:
        job: config (dict), task (texto chave=valor), heldout, sample_count,
             curve_sources, checkpoint (caminho ou None)

    Returns:
        Dict[str, Any]: VariantResult serializado
    """
    config = ModelConfig.from_dict(job["config"])
    spec = SyntheticTaskSpec.from_key_value(job["task"])
    corpus = generate_synthetic(spec)
    train_set, heldout = corpus.split(job["heldout"], seed=spec.seed)

    trainer = VEDTrainer(config, logger_name="vattn.trainer")
    evaluator = curve_evaluator(heldout, corpus.target_vocab, job["sample_count"], config.seed,
                                job["curve_sources"])
    result = trainer.train(train_set, evaluator=evaluator)

    analyzer = GenerationAnalyzer(result.model, corpus.target_vocab)
    metrics = analyzer.evaluate(heldout, job["sample_count"], config.seed)
    final = result.final
    metrics["kl_z"] = final.kl_z if final is not None else 0.0
    metrics["kl_attn_sum"] = final.kl_attn_sum if final is not None else 0.0

    checkpoint_path = job.get("checkpoint")
    if checkpoint_path:
        save_checkpoint(checkpoint_path, Checkpoint(
            config=config, params=result.params, source_vocab=corpus.source_vocab,
            target_vocab=corpus.target_vocab, step=result.state.step, epoch=config.epochs,
        ))
    return VariantResult(
        variant=config.variant,
        seed=config.seed,
        gamma_a=config.gamma_a,
        metrics=metrics,
        curves=[m.to_dict() for m in result.history],
        checkpoint=checkpoint_path,
    ).to_dict()


def _metric(row: VariantResult, key: str) -> float:
    # Métrica ausente é indefinida; comparações com NaN reprovam a verificação
    return row.metrics.get(key, float('nan'))


def directional_checks(report: ExperimentReport) -> Dict[str, bool]:
    """Verificações direcionais disponíveis para as variantes presentes"""
    checks: Dict[str, bool] = {}
    ved, hinit, dattn = report.row(Variant.VED), report.row(Variant.VED_HINIT), report.row(DATTN)
    if ved is not None and hinit is not None:
        checks["hinit_lower_kl_z"] = _metric(hinit, "kl_z") < _metric(ved, "kl_z")
    if dattn is not None:
        for variant in VATTN_VARIANTS:
            row = report.row(variant)
            if row is None:
                continue
            checks[f"{variant.value}_more_diverse"] = all(
                _metric(row, key) > _metric(dattn, key)
                for key in ("entropy_per_source_avg", "dist1", "dist2")
            )
            reference = _metric(dattn, "bleu2")
            checks[f"{variant.value}_bleu2_within_10pct"] = (
                abs(_metric(row, "bleu2") - reference) <= 0.1 * reference if reference > 0
                else _metric(row, "bleu2") == reference
            )
    return checks


def gamma_monotonicity(reports: Sequence[ExperimentReport],
                       variant: Variant = Variant.VED_VATTN_HBAR) -> Dict[int, bool]:
    """Por semente: entropia não decrescente e BLEU-2 não crescente em γ_a"""
    by_seed: Dict[int, List[ExperimentReport]] = {}
    for report in reports:
        by_seed.setdefault(report.seed, []).append(report)
    result: Dict[int, bool] = {}
    for seed, group in by_seed.items():
        rows = [r.row(variant) for r in sorted(group, key=lambda r: r.gamma_a)]
        rows = [row for row in rows if row is not None]
        if len(rows) < 2:
            continue
        entropies = [_metric(row, "entropy_per_source_avg") for row in rows]
        bleus = [_metric(row, "bleu2") for row in rows]
        result[seed] = all(a <= b for a, b in zip(entropies, entropies[1:])) and \
            all(a >= b for a, b in zip(bleus, bleus[1:]))
    return result


def summarize(reports: Sequence[ExperimentReport]) -> Dict[str, Any]:
    """Quantas sementes satisfazem cada verificação"""
    counts: Dict[str, Dict[str, int]] = {}
    for report in reports:
        for name, passed in report.checks.items():
            key = f"{name}@gamma={report.gamma_a:g}"
            entry = counts.setdefault(key, {"passed": 0, "total": 0})
            entry["total"] += 1
            entry["passed"] += int(passed)
    monotone = gamma_monotonicity(reports)
    if monotone:
        counts["gamma_monotonicity"] = {"passed": sum(monotone.values()), "total": len(monotone)}
    return counts


class BypassExperiment:
    """Orquestra as execuções, o cache de execuções e os relatórios"""

    def __init__(self, options: ExperimentOptions, cache: Optional[RunCache] = None):
        self.options = options
        self.cache = cache if cache is not None else RunCache(
            os.path.join(options.output_dir, settings.CACHE_FILE), force=options.force)
        self.file_utils = FileUtils(options.output_dir)
        self.logger = setup_logger("vattn.experiment")

    def _task_for(self, seed: int) -> SyntheticTaskSpec:
        spec = self.options.task
        return SyntheticTaskSpec(
            task=spec.task, vocab_size=spec.vocab_size, min_length=spec.min_length,
            max_length=spec.max_length, pair_count=spec.pair_count,
            templates_per_source=spec.templates_per_source, seed=seed,
        )

    def build_jobs(self, seed: int, gamma_a: float) -> List[Dict[str, Any]]:
        options = self.options
        spec = self._task_for(seed)
        vocab_size = spec.vocab_size + 4
        anneal = options.anneal(spec.pair_count - options.heldout)
        jobs = []
        for variant in options.variants:
            config = ModelConfig(
                variant=variant,
                source_vocab_size=vocab_size,
                target_vocab_size=vocab_size,
                embed_dim=options.embed_dim,
                hidden_dim=options.hidden_dim,
                latent_dim=options.latent_dim,
                gamma_a=gamma_a,
                word_dropout=options.word_dropout,
                seed=seed,
                learning_rate=options.learning_rate,
                lr_decay=options.lr_decay,
                batch_size=options.batch_size,
                epochs=options.epochs,
                **anneal,
            )
            checkpoint = None
            if options.save_checkpoints:
                checkpoint = os.path.join(options.output_dir, "checkpoints",
                                          f"{variant.value}_s{seed}_g{gamma_a:g}.ckpt")
            jobs.append({
                "config": config.to_dict(),
                "task": spec.to_key_value(),
                "heldout": options.heldout,
                "sample_count": options.sample_count,
                "curve_sources": options.curve_sources,
                "checkpoint": checkpoint,
                "key": run_key(variant.value, config.to_dict(), spec.provenance, seed),
            })
        return jobs

    def _execute(self, jobs: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
        results: Dict[int, Dict[str, Any]] = {}
        pending = []
        for index, job in enumerate(jobs):
            cached = self.cache.get(job["key"])
            if cached is not None:
                self.logger.info(f"♻️ Reutilizando execução em cache: {job['config']['variant']}")
                results[index] = cached
            else:
                pending.append(index)

        if self.options.workers > 1 and len(pending) > 1:
            with ProcessPoolExecutor(max_workers=self.options.workers) as pool:
                outputs = list(pool.map(run_variant, [jobs[i] for i in pending]))
        else:
            outputs = [run_variant(jobs[i]) for i in pending]
        for index, output in zip(pending, outputs):
            self.cache.put(jobs[index]["key"], output)
            results[index] = output
        return [results[i] for i in range(len(jobs))]

    def run_one(self, seed: int, gamma_a: float) -> ExperimentReport:
        """Todas as variantes para uma semente e um γ_a"""
        self.logger.info(f"🔬 Experimento de bypass: semente {seed}, γ_a={gamma_a:g}")
        outputs = self._execute(self.build_jobs(seed, gamma_a))
        report = ExperimentReport(
            seed=seed, gamma_a=gamma_a, task=self.options.task.task.value,
            rows=[VariantResult.from_dict(o) for o in outputs],
        )
        report.checks = directional_checks(report)
        for row in report.rows:
            if not row.is_finite():
                self.logger.warning(f"⚠️ Métricas não finitas para {row.variant.label}")
        return report

    def run(self) -> List[ExperimentReport]:
        reports = []
        for gamma_a in self.options.gamma_values:
            for seed in self.options.seeds:
                reports.append(self.run_one(seed, gamma_a))
        return reports

    def save(self, report: ExperimentReport) -> Dict[str, str]:
        """JSON, Excel e CSV de um relatório"""
        basename = f"bypass_s{report.seed}_g{report.gamma_a:g}"
        return self.file_utils.save_experiment_tables(
            report.to_dict(), rows_frame(report), curves_frame(report), basename)

    def save_summary(self, reports: Sequence[ExperimentReport]) -> str:
        path = os.path.join(self.options.output_dir, "bypass_summary.json")
        return self.file_utils.save_json({"checks": summarize(reports)}, path)


def rows_frame(report: ExperimentReport) -> pd.DataFrame:
    rows = []
    for result in report.rows:
        row = result.to_dict()
        row.pop("curves", None)
        rows.append(row)
    return pd.DataFrame(rows)


def curves_frame(report: ExperimentReport) -> pd.DataFrame:
    records = []
    for result in report.rows:
        for point in result.curves:
            record = {"variant": result.variant.value}
            record.update({k: v for k, v in point.items()})
            records.append(record)
    return pd.DataFrame(records)


def format_report_lines(report: ExperimentReport) -> List[str]:
    """Tabela de texto de um relatório, para o console"""
    header = f"{'variante':<18} {'kl_z':>8} {'bleu2':>7} {'bleu2_map':>9} {'ent/src':>8} {'dist1':>7} {'dist2':>7}"
    lines = [f"semente={report.seed} γ_a={report.gamma_a:g}", header]
    for row in report.rows:
        m = row.metrics
        lines.append(
            f"{row.variant.label:<18} {m.get('kl_z', float('nan')):>8.3f} {m.get('bleu2', float('nan')):>7.4f} "
            f"{m.get('bleu2_map', float('nan')):>9.4f} {m.get('entropy_per_source_avg', float('nan')):>8.4f} "
            f"{m.get('dist1', float('nan')):>7.4f} {m.get('dist2', float('nan')):>7.4f}"
        )
    for name, passed in report.checks.items():
        lines.append(f"{'✅' if passed else '❌'} {name}")
    return lines
