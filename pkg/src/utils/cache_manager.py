#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Gerenciador de Cache - registra execuções de treino já concluídas
"""

import hashlib
import json
import logging
import os
from typing import Any, Dict, Optional
try:
    from ..config.settings import settings
    from .file_utils import FileUtils
except ImportError:
    import sys
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', 'src'))
    from config.settings import settings
    from utils.file_utils import FileUtils

CACHE_VERSION = "1.0"


def run_key(variant: str, config: Dict[str, Any], provenance: str, seed: int) -> str:
    """Hash estável de (variante, configuração, procedência do corpus, semente)"""
    payload = json.dumps(
        {"variant": variant, "config": config, "provenance": provenance, "seed": seed},
        sort_keys=True, default=str,
    )
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()[:24]


class RunCache:
    """Cache JSON de execuções: chave → resultado serializado"""

    def __init__(self, cache_file: Optional[str] = None, force: bool = settings.FORCE_RETRAIN):
        """
        Inicializa o cache

        Args:
            cache_file: Caminho do arquivo (padrão: settings.CACHE_FILE)
            force: Ignora entradas existentes (retreina tudo)
        """
        self.cache_file = cache_file or settings.CACHE_FILE
        self.force = force
        self.file_utils = FileUtils()
        self.logger = logging.getLogger("vattn.cache")
        self.cache_data = self._load_cache()

    def _empty(self) -> Dict[str, Any]:
        return {"runs": {}, "version": CACHE_VERSION}

    def _load_cache(self) -> Dict[str, Any]:
        """Carrega dados do cache"""
        if not os.path.exists(self.cache_file):
            return self._empty()
        try:
            with open(self.cache_file, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            self.logger.warning(f"Erro ao carregar cache, recomeçando vazio: {e}")
            return self._empty()
        if data.get("version") != CACHE_VERSION or not isinstance(data.get("runs"), dict):
            return self._empty()
        return data

    def _save_cache(self):
        """Salva dados do cache"""
        self.file_utils.save_json(self.cache_data, self.cache_file)
        self.logger.debug(f"Cache salvo em: {self.cache_file}")

    def get(self, key: str) -> Optional[Dict[str, Any]]:
        """Resultado da execução, ou None se ausente ou com --force"""
        if self.force:
            return None
        return self.cache_data["runs"].get(key)

    def put(self, key: str, result: Dict[str, Any]):
        self.cache_data["runs"][key] = result
        self._save_cache()

    def clear_cache(self):
        """Limpa todo o cache"""
        self.cache_data = self._empty()
        self._save_cache()
        self.logger.info("Cache limpo")

    def get_cache_info(self) -> Dict[str, Any]:
        """Retorna informações sobre o cache"""
        return {
            "total_runs": len(self.cache_data["runs"]),
            "cache_file": self.cache_file,
            "force": self.force,
        }
