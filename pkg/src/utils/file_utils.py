#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Utilitários de Arquivo - escrita atômica, logs de métricas, gerações e relatórios
"""

import os
import json
import logging
import tempfile
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd
try:
    from ..config.settings import settings
    from .errors import InputError, ParseError
except ImportError:
    # Fallback para quando executado da raiz
    import sys
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', 'src'))
    from config.settings import settings
    from utils.errors import InputError, ParseError

# (id da origem, [(tag, texto)]) onde tag é a subsemente decimal ou 'map'
GenerationBlock = Tuple[int, List[Tuple[str, str]]]


class FileUtils:
    """Classe com utilitários para manipulação de arquivos"""

    def __init__(self, output_dir: Optional[str] = None):
        """Inicializa os utilitários de arquivo"""
        self.output_dir = output_dir or settings.OUTPUT_DIR
        self.logger = logging.getLogger("vattn.files")

    def ensure_directory_exists(self, directory: str) -> bool:
        """
        Garante que o diretório existe, criando se necessário

        Args:
            directory (str): Caminho do diretório

        Returns:
            bool: True se o diretório existe ou foi criado
        """
        if directory:
            os.makedirs(directory, exist_ok=True)
        return True

    def atomic_write_bytes(self, path: str, data: bytes) -> str:
        """
        Escreve o arquivo inteiro de forma atômica (temporário + os.replace)

        Args:
            path (str): Caminho final
            data (bytes): Conteúdo

        Returns:
            str: caminho escrito
        """
        directory = os.path.dirname(os.path.abspath(path))
        self.ensure_directory_exists(directory)
        fd, tmp_path = tempfile.mkstemp(prefix=".tmp-", dir=directory)
        try:
            with os.fdopen(fd, 'wb') as f:
                f.write(data)
            os.replace(tmp_path, path)
        except BaseException:
            if os.path.exists(tmp_path):
                os.remove(tmp_path)
            raise
        self.logger.debug(f"Arquivo salvo: {path}")
        return path

    def atomic_write_text(self, path: str, text: str) -> str:
        return self.atomic_write_bytes(path, text.encode('utf-8'))

    def read_text(self, path: str) -> str:
        """Lê um arquivo UTF-8 inteiro; InputError se ausente"""
        if not os.path.exists(path):
            raise InputError(f"Arquivo não encontrado: {path}")
        with open(path, 'rb') as f:
            raw = f.read()
        try:
            return raw.decode('utf-8')
        except UnicodeDecodeError as e:
            raise InputError(f"{path} não está em UTF-8: {e}") from e

    def save_json(self, data: Dict[str, Any], path: str) -> str:
        text = json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True, default=str)
        return self.atomic_write_text(path, text + "\n")

    def load_json(self, path: str) -> Dict[str, Any]:
        try:
            return json.loads(self.read_text(path))
        except json.JSONDecodeError as e:
            raise ParseError(f"JSON inválido: {e.msg}", e.lineno, path) from e

    # ------------------------------------------------------------------
    # Linhas chave=valor (log de métricas e relatório)
    # ------------------------------------------------------------------

    @staticmethod
    def format_key_values(values: Dict[str, Any]) -> str:
        parts = []
        for key, value in values.items():
            parts.append(f"{key}={value:.8g}" if isinstance(value, float) else f"{key}={value}")
        return " ".join(parts)

    @staticmethod
    def parse_key_values(line: str, line_number: Optional[int] = None,
                         path: Optional[str] = None) -> Dict[str, Any]:
        values: Dict[str, Any] = {}
        for token in line.split():
            key, sep, raw = token.partition('=')
            if not sep or not key:
                raise ParseError(f"campo sem '=': {token!r}", line_number, path)
            try:
                number = float(raw)
                values[key] = int(raw) if raw.lstrip('-').isdigit() else number
            except ValueError:
                values[key] = raw
        return values

    def write_metrics_log(self, path: str, lines: Sequence[str]) -> str:
        """Uma linha chave=valor por época"""
        return self.atomic_write_text(path, "".join(line + "\n" for line in lines))

    def read_metrics_log(self, path: str) -> List[Dict[str, Any]]:
        rows = []
        for number, line in enumerate(self.read_text(path).splitlines(), start=1):
            if line.strip():
                rows.append(self.parse_key_values(line, number, path))
        return rows

    def write_report(self, path: str, metrics: Dict[str, Any]) -> str:
        """Relatório de métricas: uma linha chave=valor por métrica"""
        body = "".join(self.format_key_values({k: v}) + "\n" for k, v in metrics.items())
        return self.atomic_write_text(path, body)

    def read_report(self, path: str) -> Dict[str, Any]:
        report: Dict[str, Any] = {}
        for number, line in enumerate(self.read_text(path).splitlines(), start=1):
            if line.strip():
                report.update(self.parse_key_values(line, number, path))
        return report

    # ------------------------------------------------------------------
    # Arquivo de gerações
    # ------------------------------------------------------------------

    def write_generations(self, path: str, blocks: Sequence[GenerationBlock]) -> str:
        """
        Salva gerações: cabeçalho '#source <id>' e uma linha '<tag>\\t<texto>' por geração

        Args:
            path (str): Caminho do arquivo
            blocks: Blocos (id da origem, [(tag, texto)])

        Returns:
            str: caminho escrito
        """
        lines = []
        for source_id, generations in blocks:
            lines.append(f"#source {source_id}")
            for tag, text in generations:
                lines.append(f"{tag}\t{text}")
        return self.atomic_write_text(path, "".join(line + "\n" for line in lines))

    def read_generations(self, path: str) -> List[GenerationBlock]:
        blocks: List[GenerationBlock] = []
        for number, raw in enumerate(self.read_text(path).split("\n"), start=1):
            line = raw[:-1] if raw.endswith("\r") else raw
            if not line:
                continue
            if line.startswith("#source "):
                try:
                    blocks.append((int(line.split()[1]), []))
                except (IndexError, ValueError):
                    raise ParseError("cabeçalho '#source' inválido", number, path) from None
                continue
            if not blocks:
                raise ParseError("geração antes do primeiro '#source'", number, path)
            tag, sep, text = line.partition("\t")
            if not sep:
                raise ParseError("TAB ausente entre tag e texto", number, path)
            blocks[-1][1].append((tag, text))
        for source_id, generations in blocks:
            if not generations:
                raise ParseError(f"origem {source_id} sem gerações", None, path)
        return blocks

    # ------------------------------------------------------------------
    # Relatórios de experimento (JSON + Excel + CSV)
    # ------------------------------------------------------------------

    def save_experiment_tables(self, data: Dict[str, Any], rows: pd.DataFrame, curves: pd.DataFrame,
                               basename: str, output_dir: Optional[str] = None) -> Dict[str, str]:
        """
        Salva o relatório como JSON, planilha Excel (linhas + curvas) e CSV de curvas

        Returns:
            Dict[str, str]: caminhos por formato
        """
        output_dir = output_dir or self.output_dir
        self.ensure_directory_exists(output_dir)
        paths = {
            "json": self.save_json(data, os.path.join(output_dir, f"{basename}.json")),
            "xlsx": os.path.join(output_dir, f"{basename}.xlsx"),
            "csv": os.path.join(output_dir, f"{basename}_curves.csv"),
        }
        tmp_xlsx = os.path.join(output_dir, f".{basename}.tmp.xlsx")
        with pd.ExcelWriter(tmp_xlsx, engine='openpyxl') as writer:
            rows.to_excel(writer, sheet_name='variants', index=False)
            curves.to_excel(writer, sheet_name='curves', index=False)
        os.replace(tmp_xlsx, paths["xlsx"])
        self.atomic_write_text(paths["csv"], curves.to_csv(index=False))
        self.logger.info(f"Relatório salvo: {paths['json']}")
        return paths
