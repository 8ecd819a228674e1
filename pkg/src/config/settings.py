"""
Configurações centralizadas do VAttn Toolkit
"""

import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional


def _env_flag(name: str, default: str = '0') -> bool:
    return os.getenv(name, default).lower() in ['1', 'true', 'yes']


@dataclass
class Settings:
    """Configurações do sistema"""

    # Configurações de arquivos
    OUTPUT_DIR: str = "output"
    CHECKPOINT_DIR: str = "checkpoints"
    LOG_FILE: str = "vattn.log"
    CACHE_FILE: str = "run_cache.json"
    CHECKPOINT_NAME: str = "model.ckpt"
    METRICS_LOG_NAME: str = "metrics.log"

    # Execução
    DEFAULT_SEED: int = 7
    CONCURRENT_RUNS: int = 1
    FORCE_RETRAIN: bool = False

    # Dimensões do modelo (escala de bancada)
    EMBED_DIM: int = 32
    HIDDEN_DIM: int = 32
    LATENT_DIM: int = 16
    FORGET_BIAS: float = 1.0

    # Objetivo e treinamento
    GAMMA_A: float = 0.1
    WORD_DROPOUT: float = 0.25
    KL_K: float = 0.0025
    KL_S0: float = 2500.0
    LEARNING_RATE: float = 0.005
    LR_DECAY: float = 0.95
    BATCH_SIZE: int = 100
    EPOCHS: int = 30
    CLIP_NORM: Optional[float] = 5.0
    TWO_STAGE_EPOCHS: int = 6
    LATENT_SAMPLES: int = 1
    ADAM_BETA1: float = 0.9
    ADAM_BETA2: float = 0.999
    ADAM_EPSILON: float = 1e-8

    # Atenção
    MASK_FILL: float = -1e9

    # Inferência
    SAMPLE_COUNT: int = 10
    DECODE_LENGTH_FACTOR: int = 2
    DECODE_LENGTH_MARGIN: int = 5

    # Verificação de gradiente
    GRADCHECK_HIDDEN: int = 8
    GRADCHECK_EMBED: int = 8
    GRADCHECK_LATENT: int = 4
    GRADCHECK_VOCAB: int = 12
    GRADCHECK_STEP: float = 1e-5
    GRADCHECK_TOLERANCE: float = 1e-5
    GRADCHECK_ABS_FLOOR: float = 1e-4

    # Tarefas sintéticas
    SYNTHETIC_VOCAB: int = 30
    SYNTHETIC_MIN_LEN: int = 4
    SYNTHETIC_MAX_LEN: int = 10
    SYNTHETIC_PAIRS: int = 5000
    SYNTHETIC_TEMPLATES: int = 3
    VOCAB_MAX_SIZE: int = 40000

    # Experimento de bypass
    EXPERIMENT_PAIRS: int = 2000
    EXPERIMENT_HELDOUT: int = 100
    EXPERIMENT_EPOCHS: int = 40
    EXPERIMENT_BATCH: int = 20
    EXPERIMENT_MAX_LEN: int = 8
    EXPERIMENT_CURVE_SOURCES: int = 50
    EXPERIMENT_VARIANTS: List[str] = field(default_factory=lambda: [
        'ved', 'ved-hinit', 'ved-dattn', 'ved-dattn-2stage', 'ved-vattn-0', 'ved-vattn-hbar'
    ])
    EXPERIMENT_SWEEP_VARIANTS: List[str] = field(default_factory=lambda: ['ved-vattn-hbar'])
    ANNEAL_AUTO_MIDPOINT: float = 0.4
    ANNEAL_AUTO_SPAN: float = 12.0

    # Presets de dimensão
    PRESETS: Dict[str, Dict[str, int]] = field(default_factory=lambda: {
        "desk": {"embed_dim": 32, "hidden_dim": 32, "latent_dim": 16, "batch_size": 100},
        "full": {"embed_dim": 300, "hidden_dim": 100, "latent_dim": 100, "batch_size": 100},
    })

    DEBUG: bool = field(default_factory=lambda: _env_flag('VATTN_DEBUG'))

    @classmethod
    def from_env(cls) -> 'Settings':
        """Cria configurações a partir de variáveis de ambiente"""
        seed = os.getenv('VATTN_SEED')
        parsed_seed = cls.DEFAULT_SEED
        if seed and seed.strip():
            try:
                parsed_seed = int(seed)
            except ValueError:
                parsed_seed = cls.DEFAULT_SEED
        return cls(
            OUTPUT_DIR=os.getenv('VATTN_OUTPUT_DIR', cls.OUTPUT_DIR),
            CHECKPOINT_DIR=os.getenv('VATTN_CHECKPOINT_DIR', cls.CHECKPOINT_DIR),
            LOG_FILE=os.getenv('VATTN_LOG_FILE', cls.LOG_FILE),
            CACHE_FILE=os.getenv('VATTN_CACHE_FILE', cls.CACHE_FILE),
            DEFAULT_SEED=parsed_seed,
            CONCURRENT_RUNS=int(os.getenv('VATTN_CONCURRENT_RUNS', cls.CONCURRENT_RUNS)),
            FORCE_RETRAIN=_env_flag('VATTN_FORCE_RETRAIN'),
        )


# Instância global das configurações
settings = Settings.from_env()
