#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Checkpoint: manifesto JSON em texto seguido dos parâmetros em float64 little-endian
"""

import json
from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

import numpy as np
try:
    from ..core.tensor import ParameterSet
    from ..data.vocabulary import Vocabulary
    from ..models.data_models import ModelConfig
    from .errors import CheckpointError
    from .file_utils import FileUtils
except ImportError:
    # Fallback para quando executado da raiz
    import sys
    import os
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', 'src'))
    from core.tensor import ParameterSet
    from data.vocabulary import Vocabulary
    from models.data_models import ModelConfig
    from utils.errors import CheckpointError
    from utils.file_utils import FileUtils

MAGIC = "VATTN-CHECKPOINT"
FORMAT_VERSION = 1
DTYPE = np.dtype('<f8')


@dataclass
class Checkpoint:
    config: ModelConfig
    params: ParameterSet
    source_vocab: Vocabulary
    target_vocab: Vocabulary
    step: int = 0
    epoch: int = 0

    def manifest(self) -> Dict[str, Any]:
        table = []
        offset = 0
        for param in self.params:
            count = int(param.value.size)
            table.append({"name": param.name, "shape": list(param.shape), "offset": offset, "count": count})
            offset += count
        return {
            "config": self.config.to_dict(),
            "variant": self.config.variant.value,
            "seed": self.config.seed,
            "step": self.step,
            "epoch": self.epoch,
            "vocabularies": {"source": self.source_vocab.to_dict(), "target": self.target_vocab.to_dict()},
            "parameters": table,
        }

    def to_bytes(self) -> bytes:
        manifest = json.dumps(self.manifest(), sort_keys=True, ensure_ascii=False).encode('utf-8')
        header = f"{MAGIC} {FORMAT_VERSION} {len(manifest)}\n".encode('ascii')
        payload = b"".join(np.ascontiguousarray(p.value, dtype=DTYPE).tobytes() for p in self.params)
        return header + manifest + payload

    @classmethod
    def from_bytes(cls, data: bytes, path: str = "<bytes>") -> 'Checkpoint':
        newline = data.find(b"\n")
        if newline < 0:
            raise CheckpointError(f"{path}: cabeçalho ausente")
        parts = data[:newline].decode('ascii', errors='replace').split()
        if len(parts) != 3 or parts[0] != MAGIC:
            raise CheckpointError(f"{path}: não é um checkpoint VAttn")
        if parts[1] != str(FORMAT_VERSION):
            raise CheckpointError(f"{path}: versão {parts[1]} não suportada")
        try:
            size = int(parts[2])
            manifest = json.loads(data[newline + 1:newline + 1 + size].decode('utf-8'))
        except (ValueError, UnicodeDecodeError) as e:
            raise CheckpointError(f"{path}: manifesto corrompido ({e})") from e

        raw = data[newline + 1 + size:]
        if len(raw) % DTYPE.itemsize or not isinstance(manifest, dict) or "parameters" not in manifest:
            raise CheckpointError(f"{path}: checkpoint truncado ou incompleto")
        payload = np.frombuffer(raw, dtype=DTYPE)
        table: List[Dict[str, Any]] = manifest["parameters"]
        expected = sum(entry["count"] for entry in table)
        if payload.size != expected:
            raise CheckpointError(f"{path}: payload com {payload.size} valores, manifesto declara {expected}")

        params = ParameterSet()
        for entry in table:
            values = payload[entry["offset"]:entry["offset"] + entry["count"]]
            params.create(entry["name"], values.reshape(entry["shape"]).astype(np.float64))

        config = ModelConfig.from_dict(manifest["config"])
        expected_names = set(_expected_parameter_names(config))
        if expected_names != set(params.names()):
            raise CheckpointError(f"{path}: parâmetros não correspondem à variante {config.variant.value}")
        vocabs = manifest["vocabularies"]
        return cls(
            config=config,
            params=params,
            source_vocab=Vocabulary.from_dict(vocabs["source"]),
            target_vocab=Vocabulary.from_dict(vocabs["target"]),
            step=int(manifest.get("step", 0)),
            epoch=int(manifest.get("epoch", 0)),
        )


def _expected_parameter_names(config: ModelConfig) -> List[str]:
    try:
        from ..core.seq2seq import build_params
    except ImportError:
        from core.seq2seq import build_params
    return build_params(config).names()


def save_checkpoint(path: str, checkpoint: Checkpoint) -> str:
    """Grava o checkpoint de forma atômica"""
    return FileUtils().atomic_write_bytes(path, checkpoint.to_bytes())


def load_checkpoint(path: str) -> Checkpoint:
    """Lê um checkpoint; CheckpointError se ausente ou corrompido"""
    try:
        with open(path, 'rb') as f:
            data = f.read()
    except FileNotFoundError:
        raise CheckpointError(f"Checkpoint não encontrado: {path}") from None
    return Checkpoint.from_bytes(data, path)
