"""
Sistema de logging centralizado para o VAttn Toolkit
"""

import logging
import os
from typing import Optional, Union
try:
    from ..config.settings import settings
except ImportError:
    # Fallback para quando executado da raiz
    import sys
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', 'src'))
    from config.settings import settings

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


def setup_logger(
    name: str = "vattn",
    level: Optional[int] = None,
    log_file: Union[str, bool, None] = None,
    console_output: bool = True
) -> logging.Logger:
    """
    Configura um logger personalizado

    Args:
        name: Nome do logger
        level: Nível de logging (DEBUG quando VATTN_DEBUG=1, senão INFO)
        log_file: Arquivo de log (True usa settings.LOG_FILE)
        console_output: Se deve mostrar no console

    Returns:
        Logger configurado
    """
    if level is None:
        level = logging.DEBUG if settings.DEBUG else logging.INFO

    logger = logging.getLogger(name)
    logger.setLevel(level)

    # Evitar duplicação de handlers
    if logger.handlers:
        return logger

    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)

    if console_output:
        console_handler = logging.StreamHandler()
        console_handler.setLevel(level)
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

    if log_file:
        if log_file is True:
            log_file = settings.LOG_FILE

        log_dir = os.path.dirname(log_file)
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)

        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger



def attach_log_file(path: str, name: str = "vattn") -> logging.Handler:
    """
    Acrescenta um FileHandler ao logger (uma vez por caminho)

    Os loggers filhos (vattn.trainer, vattn.cli, ...) propagam para ele,
    então cada linha chega ao arquivo uma única vez.

    Returns:
        O handler do arquivo
    """
    logger = logging.getLogger(name)
    target = os.path.abspath(path)
    for handler in logger.handlers:
        if isinstance(handler, logging.FileHandler) and handler.baseFilename == target:
            return handler
    log_dir = os.path.dirname(target)
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
    handler = logging.FileHandler(target, encoding='utf-8')
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
    logger.addHandler(handler)
    if logger.level == logging.NOTSET or logger.level > logging.INFO:
        logger.setLevel(logging.DEBUG if settings.DEBUG else logging.INFO)
    return handler
