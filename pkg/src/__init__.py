"""
VAttn Toolkit - Codificador-decodificador variacional com atenção variacional
Versão: 1.0.0
"""

__version__ = "1.0.0"
__description__ = "Modelos VED com atenção variacional, treino com annealing de KL e métricas de diversidade"
