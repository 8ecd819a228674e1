#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Vocabulário com tokens especiais fixos e tokenização por espaços
"""

from collections import Counter
from typing import Dict, Iterable, List, Sequence
try:
    from ..config.settings import settings
    from ..utils.errors import ContractError
except ImportError:
    # Fallback para quando executado da raiz
    import sys
    import os
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', 'src'))
    from config.settings import settings
    from utils.errors import ContractError

PAD, UNK, SOS, EOS = 0, 1, 2, 3
SPECIAL_TOKENS = ["<pad>", "<unk>", "<s>", "</s>"]


def tokenize(text: str) -> List[str]:
    """Tokenização por espaços em branco, em minúsculas"""
    return text.lower().split()


class Vocabulary:
    """Mapa token↔id; ids 0–3 reservados para PAD, UNK, SOS e EOS"""

    def __init__(self, tokens: Sequence[str], max_size: int = settings.VOCAB_MAX_SIZE):
        self.max_size = max_size
        self.id_to_token: List[str] = list(SPECIAL_TOKENS)
        self.token_to_id: Dict[str, int] = {tok: i for i, tok in enumerate(SPECIAL_TOKENS)}
        for token in tokens:
            if token in self.token_to_id:
                raise ContractError(f"Token duplicado no vocabulário: {token!r}")
            self.token_to_id[token] = len(self.id_to_token)
            self.id_to_token.append(token)
        if len(self) > max_size:
            raise ContractError(f"Vocabulário com {len(self)} entradas excede o máximo {max_size}")

    def __len__(self) -> int:
        return len(self.id_to_token)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_id

    def id_of(self, token: str) -> int:
        return self.token_to_id.get(token, UNK)

    def token_of(self, index: int) -> str:
        if not 0 <= index < len(self):
            raise ContractError(f"Id {index} fora do vocabulário de tamanho {len(self)}")
        return self.id_to_token[index]

    @property
    def regular_tokens(self) -> List[str]:
        return self.id_to_token[len(SPECIAL_TOKENS):]

    def to_dict(self) -> Dict[str, object]:
        return {"max_size": self.max_size, "tokens": self.regular_tokens}

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> 'Vocabulary':
        return cls(list(data["tokens"]), max_size=int(data["max_size"]))

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self.id_to_token == other.id_to_token


def build_vocab(sequences: Iterable[Sequence[str]], max_size: int = settings.VOCAB_MAX_SIZE) -> Vocabulary:
    """
    Constrói o vocabulário pelos tokens mais frequentes

    Args:
        sequences: Sequências de tokens
        max_size: Tamanho máximo incluindo os 4 especiais (> 4)

    Returns:
        Vocabulary: tokens por frequência decrescente, empates em ordem lexicográfica
    """
    if max_size <= len(SPECIAL_TOKENS):
        raise ContractError(f"max_size deve ser > {len(SPECIAL_TOKENS)}, recebido {max_size}")
    counts = Counter(tok.lower() for seq in sequences for tok in seq)
    for special in SPECIAL_TOKENS:
        counts.pop(special, None)
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    keep = [token for token, _ in ranked[:max_size - len(SPECIAL_TOKENS)]]
    return Vocabulary(keep, max_size=max_size)


def encode(text, vocab: Vocabulary) -> List[int]:
    """Texto (ou lista de tokens) → ids; desconhecidos viram UNK"""
    tokens = tokenize(text) if isinstance(text, str) else [t.lower() for t in text]
    return [vocab.id_of(tok) for tok in tokens]


def decode_tokens(ids: Iterable[int], vocab: Vocabulary) -> List[str]:
    """Ids → tokens, descartando os quatro especiais"""
    return [vocab.token_of(int(i)) for i in ids if int(i) >= len(SPECIAL_TOKENS)]


def decode(ids: Iterable[int], vocab: Vocabulary) -> str:
    return " ".join(decode_tokens(ids, vocab))


def strip_after_eos(ids: Sequence[int]) -> List[int]:
    """Corta a sequência no primeiro EOS (exclusive)"""
    out = []
    for token in ids:
        if int(token) == EOS:
            break
        out.append(int(token))
    return out
