#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Fixtures compartilhadas dos testes
"""

import os
import sys

import numpy as np
import pytest

# Adicionar o diretório src ao path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from data.corpus import ParallelCorpus, make_batch
from data.vocabulary import build_vocab, encode
from models.data_models import ModelConfig

TINY_DIMS = dict(source_vocab_size=12, target_vocab_size=12, embed_dim=6, hidden_dim=5, latent_dim=3)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: treinamentos e varreduras longas (pular com -m 'not slow')")


# Comprimentos diferentes para exercitar as máscaras
TWO_PAIRS = [([4, 5, 6, 7], [8, 9, 10]), ([5, 11], [6, 7, 8, 9])]


@pytest.fixture
def tiny_config():
    """Fábrica de ModelConfig em dimensões mínimas"""
    def build(variant, **overrides):
        values = dict(TINY_DIMS)
        values.update(overrides)
        return ModelConfig(variant=variant, **values)
    return build


@pytest.fixture
def two_pair_batch():
    return make_batch(TWO_PAIRS)


@pytest.fixture
def toy_corpus():
    """Corpus de reversão com quatro pares"""
    lines = [("a b c", "c b a"), ("b c d", "d c b"), ("a d", "d a"), ("c a b d", "d b a c")]
    source = [s.split() for s, _ in lines]
    target = [t.split() for _, t in lines]
    src_vocab = build_vocab(source)
    tgt_vocab = build_vocab(target)
    pairs = [(encode(s, src_vocab), encode(t, tgt_vocab)) for s, t in lines]
    return ParallelCorpus(pairs, src_vocab, tgt_vocab, provenance="toy")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
