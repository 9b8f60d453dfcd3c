#!/usr/bin/env python3
"""
Чтение файлов задач

[problem]     kind = heat
[parameters]  выражения и числа
[grid]        сетки
[tolerances]  допуски
[run]         seed, output
"""

import configparser
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from cli.expressions import compile_expression, parse_expression, point_function, time_point_function
from core.errors import ParseError

logger = logging.getLogger(__name__)

SECTIONS = ('problem', 'parameters', 'grid', 'tolerances', 'run')


@dataclass
class ProblemFile:
    """
    Разобранный файл задачи

    Args:
        name: Имя выходных файлов (по умолчанию имя файла без расширения)
        kind: Тип задачи
        parameters: Строки секции [parameters]
        grid: Строки секции [grid]
        tolerances: Строки секции [tolerances]
        seed: Зерно из [run] или None
        output: Каталог вывода из [run] или None
    """

    name: str
    kind: str
    parameters: Dict[str, str] = field(default_factory=dict)
    grid: Dict[str, str] = field(default_factory=dict)
    tolerances: Dict[str, str] = field(default_factory=dict)
    seed: Optional[int] = None
    output: Optional[str] = None

    def _section(self, section: str) -> Dict[str, str]:
        return {'parameters': self.parameters, 'grid': self.grid, 'tolerances': self.tolerances}[section]

    def _raw(self, key: str, section: str, default=None) -> Optional[str]:
        values = self._section(section)
        if key in values:
            return values[key]
        if default is None:
            raise ParseError(f"В секции [{section}] нет ключа '{key}'")
        return None

    def has(self, key: str, section: str = 'parameters') -> bool:
        return key in self._section(section)

    def number(self, key: str, default: Optional[float] = None, section: str = 'parameters') -> float:
        """Число; допускаются константные выражения вроде pi/2"""
        raw = self._raw(key, section, default)
        if raw is None:
            return float(default)
        expr = parse_expression(raw, ())
        try:
            return float(expr)
        except TypeError as e:
            raise ParseError(f"Ключ '{key}' должен быть числом, получено '{raw}'") from e

    def integer(self, key: str, default: Optional[int] = None, section: str = 'grid') -> int:
        value = self.number(key, default, section)
        if value != int(value):
            raise ParseError(f"Ключ '{key}' должен быть целым, получено {value}")
        return int(value)

    def numbers(self, key: str, section: str = 'parameters', default: Optional[Sequence[float]] = None) -> List[float]:
        """Список чисел через запятую"""
        if key not in self._section(section) and default is not None:
            return [float(v) for v in default]
        raw = self._raw(key, section)
        items = [item.strip() for item in raw.split(',') if item.strip()]
        if not items:
            raise ParseError(f"Список '{key}' пуст")
        return [float(parse_expression(item, ())) for item in items]

    def tolerance(self, key: str, default: float) -> float:
        return self.number(key, default, 'tolerances')

    def expression(self, key: str, variables: Sequence[str], default: Optional[str] = None) -> Callable:
        text = self.parameters.get(key, default)
        if text is None:
            raise ParseError(f"В секции [parameters] нет выражения '{key}'")
        return compile_expression(text, variables)

    def point_expression(self, key: str, dim: int, default: Optional[str] = None) -> Callable:
        text = self.parameters.get(key, default)
        if text is None:
            raise ParseError(f"В секции [parameters] нет выражения '{key}'")
        return point_function(text, dim)

    def time_point_expression(self, key: str, dim: int, default: Optional[str] = None) -> Callable:
        text = self.parameters.get(key, default)
        if text is None:
            raise ParseError(f"В секции [parameters] нет выражения '{key}'")
        return time_point_function(text, dim)


def load_problem(path) -> ProblemFile:
    """
    Прочитать файл задачи

    Raises:
        ParseError: Файл не читается, нет [problem] kind, неизвестная секция
    """
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path, 'r', encoding='utf-8') as f:
            parser.read_file(f)
    except OSError as e:
        raise ParseError(f"Не удалось прочитать файл задачи {path}: {e}") from e
    except configparser.Error as e:
        raise ParseError(f"Ошибка формата файла задачи {path}: {e}") from e

    unknown = [s for s in parser.sections() if s not in SECTIONS]
    if unknown:
        raise ParseError(f"Неизвестные секции: {', '.join(unknown)}; допустимые: {', '.join(SECTIONS)}")
    if not parser.has_option('problem', 'kind'):
        raise ParseError("В файле задачи нет [problem] kind")

    def section(name: str) -> Dict[str, str]:
        return dict(parser.items(name)) if parser.has_section(name) else {}

    run = section('run')
    seed = None
    if 'seed' in run:
        try:
            seed = int(run['seed'])
        except ValueError as e:
            raise ParseError(f"Зерно должно быть целым, получено '{run['seed']}'") from e
    problem = ProblemFile(
        name=section('problem').get('name', path.stem),
        kind=parser.get('problem', 'kind').strip(),
        parameters=section('parameters'),
        grid=section('grid'),
        tolerances=section('tolerances'),
        seed=seed,
        output=run.get('output'),
    )
    logger.info(f"Файл задачи {path}: тип {problem.kind}")
    return problem
