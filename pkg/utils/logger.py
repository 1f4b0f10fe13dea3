"""
Logger Module for Trotter Error Statistics Toolkit

This module provides logging functionality for the experiments and the numerical library.
"""

import logging
import os
import sys
from typing import Optional, Union

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def resolve_log_level(level: Optional[Union[int, str]] = None) -> int:
    """
    Resolve a log level from an explicit value or the LOG_LEVEL environment variable.

    Args:
        level (Optional[Union[int, str]]): Explicit level name or number

    Returns:
        int: Numeric logging level, INFO when nothing valid is given
    """
    if level is None:
        level = os.environ.get('LOG_LEVEL', 'INFO')
    if isinstance(level, int):
        return level
    resolved = logging.getLevelName(str(level).upper())
    return resolved if isinstance(resolved, int) else logging.INFO


def setup_logger(name: str, log_level: Optional[Union[int, str]] = None) -> logging.Logger:
    """
    Set up a logger with the specified name and log level.

    Args:
        name (str): Name of the logger
        log_level (Optional[Union[int, str]]): Log level. Defaults to LOG_LEVEL or INFO.

    Returns:
        logging.Logger: Configured logger
    """
    level = resolve_log_level(log_level)
    logger = logging.getLogger(name)
    logger.setLevel(level)

    # Handlers are attached once per name
    if getattr(logger, '_trotter_configured', False):
        for handler in logger.handlers:
            handler.setLevel(level)
        return logger

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setLevel(level)
    formatter = logging.Formatter(LOG_FORMAT)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    # Create file handler if log directory exists
    log_dir = os.path.join(os.path.dirname(os.path.dirname(__file__)), 'logs')
    if os.path.exists(log_dir):
        log_file = os.path.join(log_dir, f'{name}.log')
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    logger.propagate = False
    logger._trotter_configured = True
    return logger


def get_logger(name: str, log_level: Optional[Union[int, str]] = None) -> logging.Logger:
    """
    Get a logger with the specified name and log level.

    Args:
        name (str): Name of the logger
        log_level (Optional[Union[int, str]]): Log level. Defaults to LOG_LEVEL or INFO.

    Returns:
        logging.Logger: Configured logger
    """
    return setup_logger(name, log_level)


def set_global_level(log_level: Union[int, str]) -> None:
    """Apply a level to every logger configured through setup_logger."""
    level = resolve_log_level(log_level)
    for logger in logging.Logger.manager.loggerDict.values():
        if isinstance(logger, logging.Logger) and getattr(logger, '_trotter_configured', False):
            logger.setLevel(level)
            for handler in logger.handlers:
                handler.setLevel(level)


# Create application logger
app_logger = setup_logger('trotter_stats')
