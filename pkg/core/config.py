#!/usr/bin/env python3
"""
Загрузка конфигурации из JSON с переопределением через окружение
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / 'config.json'


def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Загрузка конфигурации из JSON файла

    Переменные SOLVERS_LOG_LEVEL, SOLVERS_SEED и SOLVERS_OUTPUT_DIR
    (в том числе из файла .env) имеют приоритет над файлом.

    Args:
        config_path: Путь к файлу, по умолчанию config.json в корне проекта

    Returns:
        Dict[str, Any]: Словарь настроек
    """
    path = Path(config_path) if config_path else DEFAULT_CONFIG_PATH
    try:
        with open(path, 'r', encoding='utf-8') as f:
            config = json.load(f)
    except FileNotFoundError:
        logger.error(f"Файл конфигурации {path} не найден!")
        raise
    except json.JSONDecodeError:
        logger.error(f"Ошибка при парсинге файла конфигурации {path}")
        raise

    load_dotenv()
    level = os.getenv('SOLVERS_LOG_LEVEL')
    if level:
        config.setdefault('logging', {})['level'] = level.upper()
    seed = os.getenv('SOLVERS_SEED')
    if seed:
        config.setdefault('random', {})['seed'] = int(seed)
    output_dir = os.getenv('SOLVERS_OUTPUT_DIR')
    if output_dir:
        config.setdefault('output', {})['directory'] = output_dir
    return config


def get_setting(config: Dict[str, Any], section: str, key: str, default: Any = None) -> Any:
    """Значение config[section][key] либо default"""
    return config.get(section, {}).get(key, default)
