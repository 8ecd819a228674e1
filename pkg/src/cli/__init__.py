"""
Módulo de linha de comando do VAttn Toolkit
"""

from .commands import build_parser, main

__all__ = ['build_parser', 'main']
