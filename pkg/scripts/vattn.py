#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
VAttn Toolkit CLI
Uso: python scripts/vattn.py train --variant ved-vattn-hbar --task one-to-many --seed 7
"""

import sys
import os

# Adicionar o diretório src ao path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from cli.commands import main

if __name__ == "__main__":
    exit(main())
