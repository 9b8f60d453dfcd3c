#!/usr/bin/env python3
"""
Запись таблиц в CSV
"""

import csv
import logging
from numbers import Integral, Real
from pathlib import Path
from typing import Iterable, Sequence

logger = logging.getLogger(__name__)


def format_value(value) -> str:
    """Число с 17 значащими цифрами, целые и строки как есть"""
    if isinstance(value, bool) or isinstance(value, str):
        return str(value)
    if isinstance(value, Integral):
        return str(int(value))
    if isinstance(value, Real):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """
    Записать CSV с заголовком

    Args:
        path: Путь к файлу (каталоги создаются)
        header: Имена столбцов
        rows: Строки значений

    Returns:
        Path: Путь к записанному файлу
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(target, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([format_value(v) for v in row])
            count += 1
    logger.info(f"Записано {count} строк в {target}")
    return target
