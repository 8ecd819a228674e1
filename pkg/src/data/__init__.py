"""
Dados: vocabulário, corpus paralelo e tarefas sintéticas
"""

from .vocabulary import PAD, UNK, SOS, EOS, Vocabulary, build_vocab, encode, decode
from .corpus import Batch, ParallelCorpus, generate_synthetic, iterate_batches, load_tsv, make_batch

__all__ = [
    'PAD',
    'UNK',
    'SOS',
    'EOS',
    'Vocabulary',
    'build_vocab',
    'encode',
    'decode',
    'Batch',
    'ParallelCorpus',
    'generate_synthetic',
    'iterate_batches',
    'load_tsv',
    'make_batch',
]
