#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Corpus paralelo: leitura TSV, tarefas sintéticas reprodutíveis e lotes
"""

import math
import os
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
try:
    from .vocabulary import EOS, PAD, SOS, Vocabulary, build_vocab, decode, encode, tokenize
    from ..config.settings import settings
    from ..models.data_models import SyntheticTaskSpec, TaskKind
    from ..utils.errors import ContractError, InputError, ParseError
    from ..utils.file_utils import FileUtils
except ImportError:
    # Fallback para quando executado da raiz
    import sys
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', 'src'))
    from data.vocabulary import EOS, PAD, SOS, Vocabulary, build_vocab, decode, encode, tokenize
    from config.settings import settings
    from models.data_models import SyntheticTaskSpec, TaskKind
    from utils.errors import ContractError, InputError, ParseError
    from utils.file_utils import FileUtils

Pair = Tuple[List[int], List[int]]


@dataclass
class ParallelCorpus:
    """Pares (origem, destino) em ids, com seus vocabulários e procedência"""
    pairs: List[Pair]
    source_vocab: Vocabulary
    target_vocab: Vocabulary
    provenance: str = "memory"

    def __post_init__(self):
        for index, (src, tgt) in enumerate(self.pairs):
            if not src or not tgt:
                raise InputError(f"Par {index} com lado vazio")
            if max(src) >= len(self.source_vocab) or max(tgt) >= len(self.target_vocab) \
                    or min(src) < 0 or min(tgt) < 0:
                raise InputError(f"Par {index} com id fora do vocabulário")

    def __len__(self) -> int:
        return len(self.pairs)

    def sources(self) -> List[List[int]]:
        return [src for src, _ in self.pairs]

    def targets(self) -> List[List[int]]:
        return [tgt for _, tgt in self.pairs]

    def subset(self, indices: Sequence[int], tag: str = "") -> 'ParallelCorpus':
        return ParallelCorpus(
            pairs=[self.pairs[i] for i in indices],
            source_vocab=self.source_vocab,
            target_vocab=self.target_vocab,
            provenance=f"{self.provenance}{tag}",
        )

    def split(self, heldout: int, seed: int = settings.DEFAULT_SEED) -> Tuple['ParallelCorpus', 'ParallelCorpus']:
        """
        Separa um conjunto de validação por permutação com semente

        Args:
            heldout: Quantidade de pares de validação (0 < heldout < len)
            seed: Semente da permutação

        Returns:
            Tuple[ParallelCorpus, ParallelCorpus]: (treino, validação)
        """
        if not 0 < heldout < len(self):
            raise ContractError(f"heldout deve estar em (0, {len(self)}), recebido {heldout}")
        order = np.random.default_rng(seed).permutation(len(self))
        train_idx = sorted(int(i) for i in order[heldout:])
        held_idx = sorted(int(i) for i in order[:heldout])
        return self.subset(train_idx, "#train"), self.subset(held_idx, "#heldout")

    def to_lines(self) -> List[str]:
        return [f"{decode(src, self.source_vocab)}\t{decode(tgt, self.target_vocab)}"
                for src, tgt in self.pairs]

    def to_tsv(self, path: str) -> str:
        FileUtils().atomic_write_text(path, "".join(line + "\n" for line in self.to_lines()))
        return path


def _split_lines(text: str) -> List[str]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [line[:-1] if line.endswith("\r") else line for line in lines]


def parse_tsv_lines(lines: Sequence[str], path: Optional[str] = None) -> List[Tuple[List[str], List[str]]]:
    """Valida e tokeniza linhas 'origem<TAB>destino' (numeração a partir de 1)"""
    pairs = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            raise ParseError("linha em branco", number, path)
        if "\t" not in line:
            raise ParseError("TAB ausente entre origem e destino", number, path)
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError(f"esperados 2 campos, encontrados {len(parts)}", number, path)
        src, tgt = tokenize(parts[0]), tokenize(parts[1])
        if not src:
            raise ParseError("origem vazia", number, path)
        if not tgt:
            raise ParseError("destino vazio", number, path)
        pairs.append((src, tgt))
    return pairs


def load_tsv(path: str, vocabs: Optional[Tuple[Vocabulary, Vocabulary]] = None,
             max_vocab: int = settings.VOCAB_MAX_SIZE) -> ParallelCorpus:
    """
    Carrega um corpus UTF-8 com um par por linha

    Args:
        path: Caminho do arquivo
        vocabs: (origem, destino); construídos a partir do arquivo se None
        max_vocab: Tamanho máximo ao construir vocabulários

    Returns:
        ParallelCorpus: pares codificados
    """
    text = FileUtils().read_text(path)
    token_pairs = parse_tsv_lines(_split_lines(text), path)
    if not token_pairs:
        raise InputError(f"Corpus vazio: {path}")
    if vocabs is None:
        vocabs = (build_vocab([s for s, _ in token_pairs], max_vocab),
                  build_vocab([t for _, t in token_pairs], max_vocab))
    source_vocab, target_vocab = vocabs
    pairs = [(encode(s, source_vocab), encode(t, target_vocab)) for s, t in token_pairs]
    return ParallelCorpus(pairs, source_vocab, target_vocab, provenance=f"file:{os.path.basename(path)}")


def load_sources(path: str, vocab: Vocabulary) -> List[List[int]]:
    """Uma sequência de origem por linha (a coluna antes do TAB, se houver)"""
    ids = []
    for number, line in enumerate(_split_lines(FileUtils().read_text(path)), start=1):
        source = line.split("\t")[0]
        if not source.strip():
            raise ParseError("origem vazia", number, path)
        ids.append(encode(source, vocab))
    if not ids:
        raise InputError(f"Nenhuma origem em {path}")
    return ids


# ---------------------------------------------------------------------------
# Tarefas sintéticas
# ---------------------------------------------------------------------------

def _first_half_repeated(tokens: List[str]) -> List[str]:
    half = tokens[:math.ceil(len(tokens) / 2)]
    return half + half


TEMPLATES: List[Tuple[str, Callable[[List[str]], List[str]]]] = [
    ("reverse", lambda t: list(reversed(t))),
    ("sorted", lambda t: sorted(t)),
    ("first-half-repeated", _first_half_repeated),
    ("rotate", lambda t: t[1:] + t[:1]),
]


def template_targets(source: Sequence[str], k: int) -> List[List[str]]:
    """Os k destinos válidos de uma origem na tarefa one-to-many"""
    if not 2 <= k <= len(TEMPLATES):
        raise ContractError(f"templates_per_source deve estar em [2, {len(TEMPLATES)}], recebido {k}")
    return [fn(list(source)) for _, fn in TEMPLATES[:k]]


def _token_names(vocab_size: int) -> List[str]:
    width = len(str(vocab_size - 1))
    return [f"w{i:0{width}d}" for i in range(vocab_size)]


def _random_sequence(rng: np.random.Generator, names: List[str], spec: SyntheticTaskSpec) -> List[str]:
    length = int(rng.integers(spec.min_length, spec.max_length + 1))
    return [names[int(i)] for i in rng.integers(0, len(names), size=length)]


def generate_token_pairs(spec: SyntheticTaskSpec) -> List[Tuple[List[str], List[str]]]:
    rng = np.random.default_rng(spec.seed)
    names = _token_names(spec.vocab_size)
    pairs = []
    if spec.task is TaskKind.ONE_TO_MANY:
        template_targets(names[:1], spec.templates_per_source)
        # Origens repetidas para que cada uma apareça com vários destinos
        pool_size = max(1, spec.pair_count // 10)
        pool = [_random_sequence(rng, names, spec) for _ in range(pool_size)]
        for _ in range(spec.pair_count):
            source = pool[int(rng.integers(0, pool_size))]
            _, template = TEMPLATES[int(rng.integers(0, spec.templates_per_source))]
            pairs.append((list(source), template(list(source))))
        return pairs
    for _ in range(spec.pair_count):
        source = _random_sequence(rng, names, spec)
        target = list(reversed(source)) if spec.task is TaskKind.REVERSE else list(source)
        pairs.append((source, target))
    return pairs


def generate_synthetic(spec: SyntheticTaskSpec) -> ParallelCorpus:
    """
    Gera o corpus de uma tarefa sintética

    reverse: destino = origem invertida; copy: destino = origem;
    one-to-many: destino sorteado entre k templates determinísticos da origem.
    """
    token_pairs = generate_token_pairs(spec)
    names = _token_names(spec.vocab_size)
    max_size = max(settings.VOCAB_MAX_SIZE, spec.vocab_size + 4)
    source_vocab = build_vocab([names], max_size)
    target_vocab = build_vocab([names], max_size)
    pairs = [(encode(s, source_vocab), encode(t, target_vocab)) for s, t in token_pairs]
    return ParallelCorpus(pairs, source_vocab, target_vocab, provenance=spec.provenance)


# ---------------------------------------------------------------------------
# Lotes
# ---------------------------------------------------------------------------

@dataclass
class Batch:
    """Lote preenchido à direita; destino de entrada começa em SOS, de saída termina em EOS"""
    source: np.ndarray
    source_lengths: np.ndarray
    target_in: np.ndarray
    target_out: np.ndarray
    target_mask: np.ndarray
    indices: List[int] = field(default_factory=list)

    @property
    def size(self) -> int:
        return int(self.source.shape[0])

    @property
    def token_count(self) -> int:
        return int(self.target_mask.sum())


def make_batch(pairs: Sequence[Pair], indices: Optional[Sequence[int]] = None) -> Batch:
    if not pairs:
        raise InputError("Lote vazio")
    batch = len(pairs)
    src_len = max(len(s) for s, _ in pairs)
    tgt_len = max(len(t) for _, t in pairs) + 1
    source = np.full((batch, src_len), PAD, dtype=np.int64)
    target_in = np.full((batch, tgt_len), PAD, dtype=np.int64)
    target_out = np.full((batch, tgt_len), PAD, dtype=np.int64)
    target_mask = np.zeros((batch, tgt_len))
    for row, (src, tgt) in enumerate(pairs):
        source[row, :len(src)] = src
        target_in[row, :len(tgt) + 1] = [SOS] + list(tgt)
        target_out[row, :len(tgt) + 1] = list(tgt) + [EOS]
        target_mask[row, :len(tgt) + 1] = 1.0
    return Batch(
        source=source,
        source_lengths=np.array([len(s) for s, _ in pairs], dtype=np.int64),
        target_in=target_in,
        target_out=target_out,
        target_mask=target_mask,
        indices=list(indices) if indices is not None else list(range(batch)),
    )


def iterate_batches(corpus: ParallelCorpus, batch_size: int,
                    order: Optional[Sequence[int]] = None) -> Iterator[Batch]:
    """Lotes consecutivos na ordem dada (a última pode ser menor)"""
    if batch_size <= 0:
        raise ContractError("batch_size deve ser positivo")
    order = list(range(len(corpus))) if order is None else [int(i) for i in order]
    for start in range(0, len(order), batch_size):
        chunk = order[start:start + batch_size]
        yield make_batch([corpus.pairs[i] for i in chunk], chunk)
