"""
Modelos de dados estruturados para o VAttn Toolkit
"""

import math
from dataclasses import asdict, dataclass, field, fields
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple
try:
    from ..config.settings import settings
    from ..utils.errors import ContractError, InputError, UsageError
except ImportError:
    # Fallback para quando executado da raiz
    import sys
    import os
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', 'src'))
    from config.settings import settings
    from utils.errors import ContractError, InputError, UsageError


class Variant(Enum):
    """Variantes do modelo (valor = nome na linha de comando)"""
    DED = "ded"
    DED_DATTN = "ded-dattn"
    VED = "ved"
    VED_HINIT = "ved-hinit"
    VED_DATTN = "ved-dattn"
    VED_DATTN_2STAGE = "ved-dattn-2stage"
    VED_VATTN_0 = "ved-vattn-0"
    VED_VATTN_HBAR = "ved-vattn-hbar"

    @classmethod
    def parse(cls, name: str) -> 'Variant':
        for variant in cls:
            if name == variant.value or name == variant.label:
                return variant
        choices = ", ".join(v.value for v in cls)
        raise UsageError(f"Variante inválida '{name}'. Opções: {choices}")

    @property
    def label(self) -> str:
        return {
            Variant.DED: "DED",
            Variant.DED_DATTN: "DED+DAttn",
            Variant.VED: "VED",
            Variant.VED_HINIT: "VED+HInit",
            Variant.VED_DATTN: "VED+DAttn",
            Variant.VED_DATTN_2STAGE: "VED+DAttn-2stage",
            Variant.VED_VATTN_0: "VED+VAttn-0",
            Variant.VED_VATTN_HBAR: "VED+VAttn-hbar",
        }[self]

    @property
    def has_latent(self) -> bool:
        return self not in (Variant.DED, Variant.DED_DATTN)

    @property
    def uses_attention(self) -> bool:
        return self in (Variant.DED_DATTN, Variant.VED_DATTN, Variant.VED_DATTN_2STAGE,
                        Variant.VED_VATTN_0, Variant.VED_VATTN_HBAR)

    @property
    def variational_attention(self) -> bool:
        return self in (Variant.VED_VATTN_0, Variant.VED_VATTN_HBAR)

    @property
    def init_from_encoder(self) -> bool:
        """Decodificador inicia no estado final do codificador"""
        return self in (Variant.DED, Variant.DED_DATTN, Variant.VED_HINIT)

    @property
    def projects_latent(self) -> bool:
        """Estado inicial do decodificador projetado a partir de z"""
        return self.has_latent and not self.init_from_encoder

    @property
    def two_stage(self) -> bool:
        return self is Variant.VED_DATTN_2STAGE


@dataclass
class AnnealSchedule:
    """Agenda logística de λ_KL"""
    k: float = settings.KL_K
    s0: float = settings.KL_S0

    def __post_init__(self):
        if self.k < 0:
            raise ContractError(f"inclinação k deve ser >= 0, recebida {self.k}")


@dataclass
class ModelConfig:
    """Configuração de uma variante e de seu treinamento"""
    variant: Variant
    source_vocab_size: int
    target_vocab_size: int
    embed_dim: int = settings.EMBED_DIM
    hidden_dim: int = settings.HIDDEN_DIM
    latent_dim: int = settings.LATENT_DIM
    max_decode_length: Optional[int] = None
    gamma_a: float = settings.GAMMA_A
    word_dropout: float = settings.WORD_DROPOUT
    kl_k: float = settings.KL_K
    kl_s0: float = settings.KL_S0
    seed: int = settings.DEFAULT_SEED
    learning_rate: float = settings.LEARNING_RATE
    lr_decay: float = settings.LR_DECAY
    batch_size: int = settings.BATCH_SIZE
    epochs: int = settings.EPOCHS
    clip_norm: Optional[float] = settings.CLIP_NORM
    two_stage_epochs: int = settings.TWO_STAGE_EPOCHS
    latent_samples: int = settings.LATENT_SAMPLES
    forget_bias: float = settings.FORGET_BIAS
    init_scheme: str = "glorot-uniform"

    def __post_init__(self):
        if isinstance(self.variant, str):
            self.variant = Variant.parse(self.variant)
        self.validate()

    def validate(self):
        """Valida invariantes da configuração"""
        for name in ('source_vocab_size', 'target_vocab_size', 'embed_dim', 'hidden_dim',
                     'latent_dim', 'batch_size', 'latent_samples'):
            if getattr(self, name) <= 0:
                raise ContractError(f"{name} deve ser positivo, recebido {getattr(self, name)}")
        if self.epochs < 0:
            raise ContractError(f"epochs deve ser >= 0, recebido {self.epochs}")
        if self.gamma_a < 0:
            raise ContractError(f"gamma_a deve ser >= 0, recebido {self.gamma_a}")
        if not 0.0 <= self.word_dropout <= 1.0:
            raise ContractError(f"word_dropout deve estar em [0, 1], recebido {self.word_dropout}")
        if self.max_decode_length is not None and self.max_decode_length <= 0:
            raise ContractError("max_decode_length deve ser positivo")
        if self.clip_norm is not None and self.clip_norm <= 0:
            raise ContractError("clip_norm deve ser positivo (ou None para desativar)")

    @property
    def schedule(self) -> AnnealSchedule:
        return AnnealSchedule(k=self.kl_k, s0=self.kl_s0)

    def decode_length(self, source_length: int) -> int:
        if self.max_decode_length is not None:
            return self.max_decode_length
        return settings.DECODE_LENGTH_FACTOR * source_length + settings.DECODE_LENGTH_MARGIN

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['variant'] = self.variant.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ModelConfig':
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})


class TaskKind(Enum):
    """Tarefas sintéticas"""
    REVERSE = "reverse"
    ONE_TO_MANY = "one-to-many"
    COPY = "copy"


@dataclass
class SyntheticTaskSpec:
    """Especificação de uma tarefa sintética reprodutível"""
    task: TaskKind = TaskKind.REVERSE
    vocab_size: int = settings.SYNTHETIC_VOCAB
    min_length: int = settings.SYNTHETIC_MIN_LEN
    max_length: int = settings.SYNTHETIC_MAX_LEN
    pair_count: int = settings.SYNTHETIC_PAIRS
    templates_per_source: int = settings.SYNTHETIC_TEMPLATES
    seed: int = settings.DEFAULT_SEED

    def __post_init__(self):
        if isinstance(self.task, str):
            try:
                self.task = TaskKind(self.task)
            except ValueError:
                choices = ", ".join(t.value for t in TaskKind)
                raise UsageError(f"Tarefa inválida '{self.task}'. Opções: {choices}") from None
        if self.vocab_size < 2 or self.pair_count < 1:
            raise ContractError("vocab_size >= 2 e pair_count >= 1 são obrigatórios")
        if not 1 <= self.min_length <= self.max_length:
            raise ContractError(f"faixa de comprimento inválida [{self.min_length}, {self.max_length}]")
        if self.task is TaskKind.ONE_TO_MANY and self.templates_per_source < 2:
            raise ContractError("one-to-many exige templates_per_source >= 2")

    def to_key_value(self) -> str:
        lines = [f"task={self.task.value}"]
        for name in ('vocab_size', 'min_length', 'max_length', 'pair_count',
                     'templates_per_source', 'seed'):
            lines.append(f"{name}={getattr(self, name)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_key_value(cls, text: str) -> 'SyntheticTaskSpec':
        values: Dict[str, Any] = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            key, _, value = line.partition('=')
            values[key.strip()] = value.strip()
        kwargs: Dict[str, Any] = {'task': values.pop('task', TaskKind.REVERSE.value)}
        for key, value in values.items():
            kwargs[key] = int(value)
        return cls(**kwargs)

    @property
    def provenance(self) -> str:
        return "synthetic:" + ",".join(self.to_key_value().split())


class DecodeMode(Enum):
    MAP = "map"
    SAMPLING = "sampling"


@dataclass
class DecodeRequest:
    """Pedido de decodificação"""
    source: List[int]
    mode: DecodeMode = DecodeMode.MAP
    sample_count: int = settings.SAMPLE_COUNT
    max_length: Optional[int] = None
    seed: int = settings.DEFAULT_SEED

    def __post_init__(self):
        if isinstance(self.mode, str):
            self.mode = DecodeMode(self.mode)
        if self.sample_count < 1:
            raise ContractError("sample_count deve ser >= 1")


@dataclass
class Generation:
    """Uma sequência gerada e a subsemente que a produziu (None para MAP)"""
    tokens: List[int]
    subseed: Optional[int] = None

    @property
    def tag(self) -> str:
        return "map" if self.subseed is None else str(self.subseed)


@dataclass
class EpochMetrics:
    """Métricas agregadas de uma época de treinamento"""
    epoch: int
    step: int
    lr: float
    lambda_kl: float  # média ponderada da época
    rec_loss: float
    kl_z: float
    kl_attn_sum: float
    total: float
    accuracy: float = float('nan')
    curves: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "epoch": self.epoch,
            "step": self.step,
            "lr": self.lr,
            "lambda_kl": self.lambda_kl,
            "rec_loss": self.rec_loss,
            "kl_z": self.kl_z,
            "kl_attn_sum": self.kl_attn_sum,
            "total": self.total,
            "accuracy": self.accuracy,
        }
        data.update(self.curves)
        return data

    def to_line(self) -> str:
        parts = []
        for key, value in self.to_dict().items():
            if isinstance(value, float):
                parts.append(f"{key}={value:.8g}")
            else:
                parts.append(f"{key}={value}")
        return " ".join(parts)


@dataclass
class GenerationSet:
    """Gerações por fonte com a(s) referência(s) correspondente(s)"""
    entries: List[Tuple[int, List[List[str]], List[str]]] = field(default_factory=list)

    def add(self, source_id: int, hypotheses: Sequence[Sequence[str]], reference: Sequence[str]):
        if not hypotheses:
            raise InputError(f"fonte {source_id} sem hipóteses")
        self.entries.append((source_id, [list(h) for h in hypotheses], list(reference)))

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def sample_count(self) -> int:
        return min(len(h) for _, h, _ in self.entries) if self.entries else 0

    def references(self) -> List[List[str]]:
        return [ref for _, _, ref in self.entries]

    def hypotheses_at(self, index: int) -> List[List[str]]:
        return [hyps[index] for _, hyps, _ in self.entries]

    def all_hypotheses(self) -> List[List[str]]:
        return [h for _, hyps, _ in self.entries for h in hyps]

    def groups(self) -> List[List[List[str]]]:
        return [hyps for _, hyps, _ in self.entries]


REPORT_FIELDS = [
    'bleu1_map', 'bleu2_map', 'bleu3_map', 'bleu4_map',
    'bleu1', 'bleu2', 'bleu3', 'bleu4', 'bleu2_pooled',
    'entropy_corpus', 'entropy_per_source_avg', 'dist1', 'dist2',
    'kl_z', 'kl_attn_sum',
]


@dataclass
class VariantResult:
    """Linha do relatório de experimento para uma variante"""
    variant: Variant
    seed: int
    gamma_a: float
    metrics: Dict[str, float]
    curves: List[Dict[str, Any]] = field(default_factory=list)
    checkpoint: Optional[str] = None

    def is_finite(self) -> bool:
        return all(math.isfinite(self.metrics.get(k, float('nan'))) for k in REPORT_FIELDS)

    def to_dict(self) -> Dict[str, Any]:
        row: Dict[str, Any] = {"variant": self.variant.value, "label": self.variant.label,
                               "seed": self.seed, "gamma_a": self.gamma_a}
        for key in REPORT_FIELDS:
            row[key] = self.metrics.get(key, float('nan'))
        row["checkpoint"] = self.checkpoint
        row["curves"] = self.curves
        return row

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'VariantResult':
        return cls(
            variant=Variant.parse(data["variant"]),
            seed=int(data["seed"]),
            gamma_a=float(data["gamma_a"]),
            metrics={k: float(data[k]) for k in REPORT_FIELDS if k in data},
            curves=list(data.get("curves", [])),
            checkpoint=data.get("checkpoint"),
        )


@dataclass
class ExperimentReport:
    """Relatório comparativo entre variantes"""
    seed: int
    gamma_a: float
    task: str
    rows: List[VariantResult] = field(default_factory=list)
    checks: Dict[str, bool] = field(default_factory=dict)

    def row(self, variant: Variant) -> Optional[VariantResult]:
        for result in self.rows:
            if result.variant is variant:
                return result
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "gamma_a": self.gamma_a,
            "task": self.task,
            "rows": [r.to_dict() for r in self.rows],
            "checks": dict(self.checks),
        }
