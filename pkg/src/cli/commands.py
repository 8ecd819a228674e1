#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Interface de linha de comando do VAttn Toolkit
Uso: python scripts/vattn.py <train|generate|evaluate|gradcheck|bypass-experiment|compare> [opções]
"""

import argparse
import os
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
try:
    from ..analyzers.bypass_experiment import BypassExperiment, ExperimentOptions, format_report_lines, summarize
    from ..analyzers.generation_analyzer import GenerationAnalyzer, curve_evaluator, side_by_side
    from ..analyzers.metrics import evaluate_generations
    from ..config.settings import settings
    from ..core.gradcheck import grad_check
    from ..core.model import VariationalEncoderDecoder
    from ..core.trainer import VEDTrainer
    from ..data.corpus import ParallelCorpus, generate_synthetic, load_sources, load_tsv, make_batch
    from ..data.vocabulary import tokenize
    from ..models.data_models import (
        GenerationSet, ModelConfig, SyntheticTaskSpec, TaskKind, Variant,
    )
    from ..utils.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
    from ..utils.errors import InputError, UsageError, VAttnError
    from ..utils.file_utils import FileUtils
    from ..utils.logger import attach_log_file, setup_logger
except ImportError:
    # Fallback para quando executado da raiz
    import sys
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', 'src'))
    from analyzers.bypass_experiment import BypassExperiment, ExperimentOptions, format_report_lines, summarize
    from analyzers.generation_analyzer import GenerationAnalyzer, curve_evaluator, side_by_side
    from analyzers.metrics import evaluate_generations
    from config.settings import settings
    from core.gradcheck import grad_check
    from core.model import VariationalEncoderDecoder
    from core.trainer import VEDTrainer
    from data.corpus import ParallelCorpus, generate_synthetic, load_sources, load_tsv, make_batch
    from data.vocabulary import tokenize
    from models.data_models import (
        GenerationSet, ModelConfig, SyntheticTaskSpec, TaskKind, Variant,
    )
    from utils.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
    from utils.errors import InputError, UsageError, VAttnError
    from utils.file_utils import FileUtils
    from utils.logger import attach_log_file, setup_logger

# Lote fixo da verificação de gradiente: comprimentos diferentes exercitam as máscaras
GRADCHECK_PAIRS = [([4, 5, 6, 7], [8, 9, 10]), ([5, 11], [6, 7, 8, 9])]


def _parse_list(text: str, cast, flag: str) -> List[Any]:
    try:
        values = [cast(part.strip()) for part in text.split(',') if part.strip()]
    except ValueError:
        raise UsageError(f"{flag}: lista inválida {text!r}") from None
    if not values:
        raise UsageError(f"{flag}: lista vazia")
    return values


def _dims(args: argparse.Namespace) -> Dict[str, int]:
    """Dimensões: flag explícita > preset > settings"""
    preset = {}
    if getattr(args, 'preset', None):
        if args.preset not in settings.PRESETS:
            raise UsageError(f"Preset desconhecido: {args.preset} (opções: {', '.join(settings.PRESETS)})")
        preset = settings.PRESETS[args.preset]
    resolved = {
        "embed_dim": args.embed if args.embed is not None else preset.get("embed_dim", settings.EMBED_DIM),
        "hidden_dim": args.hidden if args.hidden is not None else preset.get("hidden_dim", settings.HIDDEN_DIM),
        "latent_dim": args.latent if args.latent is not None else preset.get("latent_dim", settings.LATENT_DIM),
        "batch_size": args.batch if args.batch is not None else preset.get("batch_size", settings.BATCH_SIZE),
    }
    return resolved


def _load_corpus(args: argparse.Namespace) -> ParallelCorpus:
    if args.corpus:
        return load_tsv(args.corpus, max_vocab=args.vocab)
    spec = SyntheticTaskSpec(
        task=TaskKind(args.task),
        vocab_size=args.vocab_size,
        max_length=args.max_len,
        min_length=min(settings.SYNTHETIC_MIN_LEN, args.max_len),
        pair_count=args.pairs,
        seed=args.seed,
    )
    return generate_synthetic(spec)


def _load_model(path: str):
    checkpoint = load_checkpoint(path)
    return checkpoint, VariationalEncoderDecoder(checkpoint.config, checkpoint.params)


# ---------------------------------------------------------------------------
# Comandos
# ---------------------------------------------------------------------------

def cmd_train(args: argparse.Namespace) -> int:
    """Treina uma variante e grava checkpoint e log de métricas"""
    logger = setup_logger("vattn.cli")
    variant = Variant.parse(args.variant)
    corpus = _load_corpus(args)
    if args.save_corpus:
        corpus.to_tsv(args.save_corpus)

    train_set, evaluator = corpus, None
    if args.heldout:
        train_set, heldout = corpus.split(args.heldout, seed=args.seed)
        evaluator = curve_evaluator(heldout, corpus.target_vocab, settings.SAMPLE_COUNT, args.seed)

    dims = _dims(args)
    config = ModelConfig(
        variant=variant,
        source_vocab_size=len(corpus.source_vocab),
        target_vocab_size=len(corpus.target_vocab),
        embed_dim=dims["embed_dim"],
        hidden_dim=dims["hidden_dim"],
        latent_dim=dims["latent_dim"],
        max_decode_length=args.decode_len,
        gamma_a=args.gamma_a,
        word_dropout=args.word_dropout,
        kl_k=args.kl_k,
        kl_s0=args.kl_s0,
        seed=args.seed,
        learning_rate=args.lr,
        lr_decay=args.lr_decay,
        batch_size=dims["batch_size"],
        epochs=args.epochs,
        latent_samples=args.latent_samples,
    )
    result = VEDTrainer(config).train(train_set, evaluator=evaluator)

    file_utils = FileUtils(args.output)
    file_utils.ensure_directory_exists(args.output)
    checkpoint_path = os.path.join(args.output, settings.CHECKPOINT_NAME)
    save_checkpoint(checkpoint_path, Checkpoint(
        config=config, params=result.params, source_vocab=corpus.source_vocab,
        target_vocab=corpus.target_vocab, step=result.state.step, epoch=config.epochs,
    ))
    metrics_path = args.metrics_log or os.path.join(args.output, settings.METRICS_LOG_NAME)
    file_utils.write_metrics_log(metrics_path, [m.to_line() for m in result.history])

    logger.info(f"Checkpoint salvo em: {checkpoint_path}")
    print(f"✅ {variant.label} treinado: {len(result.history)} épocas, passo {result.state.step}")
    print(f"💾 Checkpoint: {checkpoint_path}")
    print(f"📊 Métricas: {metrics_path}")
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    """Decodifica um arquivo de origens em modo MAP ou por amostragem"""
    checkpoint, model = _load_model(args.checkpoint)
    sampled = args.mode == "sampling"
    if sampled and not model.variant.has_latent:
        raise UsageError(f"Modo sampling indisponível para {model.variant.label}: use --mode map")
    if args.n < 1:
        raise UsageError("--n deve ser >= 1")

    sources = load_sources(args.input, checkpoint.source_vocab)
    analyzer = GenerationAnalyzer(model, checkpoint.target_vocab)
    generations = analyzer.generate(sources, args.n if sampled else None, args.seed)
    FileUtils().write_generations(args.output, analyzer.to_blocks(generations))
    print(f"💾 {len(sources)} origens decodificadas ({args.mode}) em: {args.output}")
    return 0


def read_references(path: str) -> List[List[str]]:
    """Uma referência por linha (a coluna depois do TAB, se houver)"""
    lines = FileUtils().read_text(path).splitlines()
    return [tokenize(line.split("\t")[-1]) for line in lines]


def build_generation_set(blocks, references: Sequence[Sequence[str]]) -> GenerationSet:
    if len(blocks) != len(references):
        raise InputError(f"{len(blocks)} blocos de gerações para {len(references)} referências")
    generations = GenerationSet()
    for (source_id, lines), reference in zip(blocks, references):
        generations.add(source_id, [tokenize(text) for _, text in lines], reference)
    return generations


def cmd_evaluate(args: argparse.Namespace) -> int:
    """Métricas de um arquivo de gerações contra as referências"""
    file_utils = FileUtils()
    blocks = file_utils.read_generations(args.generations)
    generations = build_generation_set(blocks, read_references(args.references))
    sampled = any(tag != "map" for _, lines in blocks for tag, _ in lines)
    report = evaluate_generations(generations, sampled=sampled)
    if args.output:
        file_utils.write_report(args.output, report)
        print(f"💾 Relatório salvo em: {args.output}")
    for key, value in report.items():
        print(FileUtils.format_key_values({key: value}))
    return 0


def gradcheck_config(variant: Variant, seed: int) -> ModelConfig:
    return ModelConfig(
        variant=variant,
        source_vocab_size=settings.GRADCHECK_VOCAB,
        target_vocab_size=settings.GRADCHECK_VOCAB,
        embed_dim=settings.GRADCHECK_EMBED,
        hidden_dim=settings.GRADCHECK_HIDDEN,
        latent_dim=settings.GRADCHECK_LATENT,
        word_dropout=0.0,
        seed=seed,
    )


def run_gradcheck(variant: Variant, seed: int, step: float, tolerance: float,
                  inject_fault: Optional[str] = None):
    """
    Verificação de gradiente de uma variante com ruído congelado e λ = 1

    Args:
        variant: Variante a construir nas dimensões de verificação
        seed: Semente dos parâmetros e do ruído
        step: Passo h das diferenças centrais
        tolerance: Erro relativo máximo aceito
        inject_fault: Parâmetro cujo gradiente analítico tem o sinal trocado

    Returns:
        GradCheckReport
    """
    model = VariationalEncoderDecoder(gradcheck_config(variant, seed))
    batch = make_batch(GRADCHECK_PAIRS)

    def loss(params):
        return model.forward(batch, np.random.default_rng(seed), lambda_kl=1.0).total

    hook = None
    if inject_fault is not None:
        def hook(grads):
            grads[inject_fault] = -grads[inject_fault]
            return grads

    # Todos os elementos de todos os parâmetros
    return grad_check(loss, model.params, step=step, tolerance=tolerance, max_elements=None,
                      abs_floor=settings.GRADCHECK_ABS_FLOOR, seed=seed, gradient_hook=hook)


def cmd_gradcheck(args: argparse.Namespace) -> int:
    """Verifica os gradientes de uma ou de todas as variantes"""
    variants = list(Variant) if args.variant == "all" else [Variant.parse(args.variant)]
    if args.inject_fault is not None:
        names = [v for v in variants
                 if args.inject_fault in VariationalEncoderDecoder(gradcheck_config(v, args.seed)).params]
        if not names:
            raise UsageError(f"Parâmetro inexistente nas variantes selecionadas: {args.inject_fault}")
        variants = names

    failed = []
    for variant in variants:
        report = run_gradcheck(variant, args.seed, args.step, args.tolerance, args.inject_fault)
        status = "✅" if report.passed else "❌"
        print(f"{status} {variant.value}: max_rel_err={report.max_relative_error:.3e}")
        for line in report.to_lines():
            print(f"   {line}")
        if not report.passed:
            failed.append(variant.value)
            for entry in report.failures:
                print(f"   ❌ falha em {entry.name}")
    if failed:
        print(f"❌ Verificação de gradiente falhou: {', '.join(failed)}")
        return 1
    print("✅ Todos os gradientes conferem")
    return 0


def cmd_bypass_experiment(args: argparse.Namespace) -> int:
    """Compara as variantes VED no corpus one-to-many"""
    logger = setup_logger("vattn.cli")
    dims = _dims(args)
    variants = [Variant.parse(v) for v in _parse_list(args.variants, str, "--variants")]
    options = ExperimentOptions(
        variants=variants,
        seeds=_parse_list(args.seeds, int, "--seeds"),
        gamma_values=_parse_list(args.gamma_sweep, float, "--gamma-sweep"),
        task=SyntheticTaskSpec(task=TaskKind.ONE_TO_MANY, max_length=args.max_len,
                               pair_count=args.pairs, seed=settings.DEFAULT_SEED),
        heldout=args.heldout,
        epochs=args.epochs,
        batch_size=dims["batch_size"],
        embed_dim=dims["embed_dim"],
        hidden_dim=dims["hidden_dim"],
        latent_dim=dims["latent_dim"],
        learning_rate=args.lr,
        word_dropout=args.word_dropout,
        kl_k=args.kl_k,
        kl_s0=args.kl_s0,
        sample_count=args.n,
        workers=args.workers,
        force=args.force,
        output_dir=args.output_dir,
    )
    experiment = BypassExperiment(options)
    reports = experiment.run()
    for report in reports:
        paths = experiment.save(report)
        print("\n".join(format_report_lines(report)))
        print(f"💾 {paths['json']}\n")
    summary_path = experiment.save_summary(reports)
    for name, counts in summarize(reports).items():
        print(f"📊 {name}: {counts['passed']}/{counts['total']} sementes")
    logger.info(f"Resumo salvo em: {summary_path}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    """Gerações lado a lado de dois checkpoints"""
    checkpoint_a, model_a = _load_model(args.checkpoint_a)
    checkpoint_b, model_b = _load_model(args.checkpoint_b)
    if checkpoint_a.source_vocab != checkpoint_b.source_vocab:
        raise UsageError("Os checkpoints usam vocabulários de origem diferentes")
    sources = load_sources(args.input, checkpoint_a.source_vocab)
    table = side_by_side(
        GenerationAnalyzer(model_a, checkpoint_a.target_vocab),
        GenerationAnalyzer(model_b, checkpoint_b.target_vocab),
        sources, checkpoint_a.source_vocab, args.n, args.seed,
    )
    if args.output:
        FileUtils().atomic_write_text(args.output, table.to_csv(index=False))
        print(f"💾 Comparação salva em: {args.output}")
    else:
        print(table.to_string(index=False))
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_model_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--hidden', type=int, help=f'Dimensão oculta (padrão: {settings.HIDDEN_DIM})')
    parser.add_argument('--embed', type=int, help=f'Dimensão dos embeddings (padrão: {settings.EMBED_DIM})')
    parser.add_argument('--latent', type=int, help=f'Dimensão de z (padrão: {settings.LATENT_DIM})')
    parser.add_argument('--batch', type=int, help=f'Tamanho do lote (padrão: {settings.BATCH_SIZE})')
    parser.add_argument('--preset', choices=sorted(settings.PRESETS), help='Dimensões pré-definidas')
    parser.add_argument('--word-dropout', type=float, default=settings.WORD_DROPOUT, help='Taxa de word dropout')
    parser.add_argument('--kl-k', type=float, help='Inclinação da agenda logística de λ_KL')
    parser.add_argument('--kl-s0', type=float, help='Ponto médio (passo) da agenda de λ_KL')
    parser.add_argument('--lr', type=float, default=settings.LEARNING_RATE, help='Taxa de aprendizado do Adam')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='vattn', description='VAttn Toolkit - codificador-decodificador variacional')
    parser.add_argument('--log-file', help='Grava também o log neste arquivo')
    sub = parser.add_subparsers(dest='command', required=True)

    train = sub.add_parser('train', help='Treina uma variante')
    train.add_argument('--variant', required=True, help=f"Uma de: {', '.join(v.value for v in Variant)}")
    _add_model_flags(train)
    train.add_argument('--gamma-a', type=float, default=settings.GAMMA_A, help='Peso do KL da atenção')
    train.add_argument('--lr-decay', type=float, default=settings.LR_DECAY, help='Decaimento da lr por época')
    train.add_argument('--epochs', type=int, default=settings.EPOCHS, help='Número de épocas')
    train.add_argument('--seed', type=int, default=settings.DEFAULT_SEED, help='Semente')
    train.add_argument('--task', choices=[t.value for t in TaskKind], default=TaskKind.REVERSE.value,
                       help='Tarefa sintética (ignorada com --corpus)')
    train.add_argument('--corpus', help='Corpus TSV (origem<TAB>destino)')
    train.add_argument('--max-len', type=int, default=settings.SYNTHETIC_MAX_LEN, help='Comprimento máximo sintético')
    train.add_argument('--pairs', type=int, default=settings.SYNTHETIC_PAIRS, help='Pares sintéticos')
    train.add_argument('--vocab-size', type=int, default=settings.SYNTHETIC_VOCAB, help='Tokens da tarefa sintética')
    train.add_argument('--vocab', type=int, default=settings.VOCAB_MAX_SIZE, help='Tamanho máximo do vocabulário TSV')
    train.add_argument('--heldout', type=int, default=0, help='Pares de validação para as curvas')
    train.add_argument('--latent-samples', type=int, default=settings.LATENT_SAMPLES, help='Amostras por sequência')
    train.add_argument('--decode-len', type=int, help='Limite fixo de tokens na decodificação')
    train.add_argument('--output', default=settings.OUTPUT_DIR, help='Diretório de saída')
    train.add_argument('--metrics-log', help='Arquivo do log de métricas por época')
    train.add_argument('--save-corpus', help='Grava o corpus usado em TSV')
    train.set_defaults(handler=cmd_train)

    generate = sub.add_parser('generate', help='Decodifica origens com um checkpoint')
    generate.add_argument('--checkpoint', required=True, help='Arquivo de checkpoint')
    generate.add_argument('--input', required=True, help='Arquivo de origens (uma por linha)')
    generate.add_argument('--mode', choices=['map', 'sampling'], default='map', help='Modo de inferência')
    generate.add_argument('--n', type=int, default=settings.SAMPLE_COUNT, help='Amostras por origem')
    generate.add_argument('--seed', type=int, default=settings.DEFAULT_SEED, help='Semente base')
    generate.add_argument('--output', required=True, help='Arquivo de gerações')
    generate.set_defaults(handler=cmd_generate)

    evaluate = sub.add_parser('evaluate', help='BLEU, entropia e Dist-n de um arquivo de gerações')
    evaluate.add_argument('--generations', required=True, help='Arquivo de gerações')
    evaluate.add_argument('--references', required=True, help='Referências (uma por linha)')
    evaluate.add_argument('--output', help='Relatório chave=valor')
    evaluate.set_defaults(handler=cmd_evaluate)

    gradcheck = sub.add_parser('gradcheck', help='Verificação de gradiente por diferenças finitas')
    gradcheck.add_argument('--variant', default='all', help='Variante ou "all"')
    gradcheck.add_argument('--inject-fault', metavar='PARAM', help='Troca o sinal do gradiente de PARAM')
    gradcheck.add_argument('--tolerance', type=float, default=settings.GRADCHECK_TOLERANCE, help='Erro relativo máximo')
    gradcheck.add_argument('--step', type=float, default=settings.GRADCHECK_STEP, help='Passo h')
    gradcheck.add_argument('--seed', type=int, default=settings.DEFAULT_SEED, help='Semente')
    gradcheck.set_defaults(handler=cmd_gradcheck)

    bypass = sub.add_parser('bypass-experiment', help='Compara as variantes VED (bypass da atenção)')
    _add_model_flags(bypass)
    bypass.add_argument('--variants', default=",".join(settings.EXPERIMENT_VARIANTS), help='Variantes (vírgulas)')
    bypass.add_argument('--gamma-sweep', default=str(settings.GAMMA_A), help='Valores de γ_a (vírgulas)')
    bypass.add_argument('--seeds', default=str(settings.DEFAULT_SEED), help='Sementes (vírgulas)')
    bypass.add_argument('--epochs', type=int, default=settings.EXPERIMENT_EPOCHS, help='Épocas por variante')
    bypass.add_argument('--pairs', type=int, default=settings.EXPERIMENT_PAIRS, help='Pares sintéticos')
    bypass.add_argument('--max-len', type=int, default=settings.EXPERIMENT_MAX_LEN, help='Comprimento máximo')
    bypass.add_argument('--heldout', type=int, default=settings.EXPERIMENT_HELDOUT, help='Pares de validação')
    bypass.add_argument('--n', type=int, default=settings.SAMPLE_COUNT, help='Amostras por origem')
    bypass.add_argument('--workers', type=int, default=settings.CONCURRENT_RUNS, help='Processos paralelos')
    bypass.add_argument('--force', action='store_true', help='Ignora o cache de execuções')
    bypass.add_argument('--output-dir', default=settings.OUTPUT_DIR, help='Diretório dos relatórios')
    bypass.set_defaults(handler=cmd_bypass_experiment)

    compare = sub.add_parser('compare', help='Gerações lado a lado de dois checkpoints')
    compare.add_argument('--checkpoint-a', required=True, help='Primeiro checkpoint')
    compare.add_argument('--checkpoint-b', required=True, help='Segundo checkpoint')
    compare.add_argument('--input', required=True, help='Arquivo de origens')
    compare.add_argument('--n', type=int, default=3, help='Amostras por origem (variantes VED)')
    compare.add_argument('--seed', type=int, default=settings.DEFAULT_SEED, help='Semente base')
    compare.add_argument('--output', help='CSV de saída (padrão: imprime a tabela)')
    compare.set_defaults(handler=cmd_compare)
    return parser


def _train_defaults(args: argparse.Namespace):
    # Agenda de λ_KL: flags ausentes usam settings
    if getattr(args, 'command', None) == 'train':
        if args.kl_k is None:
            args.kl_k = settings.KL_K
        if args.kl_s0 is None:
            args.kl_s0 = settings.KL_S0
    if getattr(args, 'command', None) == 'bypass-experiment' and args.batch is None:
        args.batch = settings.EXPERIMENT_BATCH


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Função principal: 0 em sucesso, 2 para uso incorreto, 1 para os demais erros"""
    parser = build_parser()
    args = parser.parse_args(argv)
    _train_defaults(args)
    if args.log_file:
        attach_log_file(args.log_file)
    logger = setup_logger("vattn.cli")
    try:
        return args.handler(args)
    except UsageError as e:
        logger.error(f"Uso incorreto: {e}")
        print(f"❌ Erro de uso: {e}")
        return 2
    except VAttnError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"❌ Erro: {e}")
        return 1
