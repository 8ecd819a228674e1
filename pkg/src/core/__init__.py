"""
Módulo core do VAttn Toolkit: tensores, modelo, treino e inferência
"""

from .tensor import ComputationRecord, Parameter, ParameterSet, Tensor, backward
from .gradcheck import GradCheckReport, grad_check
from .gaussian import DiagonalGaussian, GaussianPrior, PriorKind, kl_monte_carlo, kl_to_prior, sample
from .model import LossBreakdown, VariationalEncoderDecoder
from .trainer import TrainResult, VEDTrainer, train
from .inference import decode_map, decode_map_batch, decode_sample, sample_many

__all__ = [
    'ComputationRecord',
    'Parameter',
    'ParameterSet',
    'Tensor',
    'backward',
    'GradCheckReport',
    'grad_check',
    'DiagonalGaussian',
    'GaussianPrior',
    'PriorKind',
    'kl_monte_carlo',
    'kl_to_prior',
    'sample',
    'LossBreakdown',
    'VariationalEncoderDecoder',
    'TrainResult',
    'VEDTrainer',
    'train',
    'decode_map',
    'decode_map_batch',
    'decode_sample',
    'sample_many',
]
