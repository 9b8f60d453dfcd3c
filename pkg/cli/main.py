#!/usr/bin/env python3
"""
Пакетный запуск задач: solve, verify, converge

    python -m cli.main solve problems/heat_cos.ini --out output --seed 7

Коды возврата: 0 - все проверки пройдены, 2 - ошибка решателя или
непройденная проверка, 3 - ошибка файла задачи.
"""

import argparse
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

from cli.problem_file import load_problem
from cli.runners import REGISTRIES, Check, RunResult, dispatch
from core.config import get_setting, load_config
from core.errors import CausticError, ParseError, SolverError
from core.export import write_csv

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_SOLVER = 2
EXIT_PARSE = 3
REPORT_HEADER = ('check', 'value', 'tolerance', 'passed')


@dataclass
class RunSummary:
    """Итог запуска: код возврата, время, сводка проверок и записанные файлы"""

    exit_status: int
    wall_time: float
    checks: List[Check] = field(default_factory=list)
    outputs: List[Path] = field(default_factory=list)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='solvers', description="Решение и проверка задач из файлов описания")
    verbs = parser.add_subparsers(dest='verb', required=True)
    for verb, help_text in (('solve', "решить задачу и записать сетку решения"),
                            ('verify', "выполнить проверки невязок и принципов максимума"),
                            ('converge', "исследование сходимости")):
        sub = verbs.add_parser(verb, help=help_text)
        sub.add_argument('problem', help="файл задачи")
        sub.add_argument('--out', default=None, help="каталог вывода")
        sub.add_argument('--seed', type=int, default=None, help="зерно генератора")
    return parser


def _error_checks(error: SolverError) -> List[Check]:
    checks = [Check('error', f"{type(error).__name__}: {error}", '', False)]
    if isinstance(error, CausticError):
        checks.append(Check('caustic_t', error.t, '', False))
        checks += [Check(f"caustic_x{i + 1}", v, '', False) for i, v in enumerate(error.x)]
    return checks


def run(verb: str, problem_path, out: Optional[str] = None, seed: Optional[int] = None,
        config: Optional[dict] = None) -> RunSummary:
    """
    Выполнить одну команду над файлом задачи

    Args:
        verb: solve | verify | converge
        problem_path: Путь к файлу задачи
        out: Каталог вывода (приоритетнее [run] output и конфигурации)
        seed: Зерно (приоритетнее [run] seed и конфигурации)
        config: Настройки; по умолчанию load_config()

    Returns:
        RunSummary: Код возврата и записанные файлы
    """
    if verb not in REGISTRIES:
        raise ValueError(f"Неизвестная команда {verb}")
    config = config if config is not None else load_config()
    started = time.perf_counter()
    try:
        problem = load_problem(problem_path)
    except ParseError as e:
        logger.error(f"Ошибка файла задачи: {e}")
        return RunSummary(EXIT_PARSE, time.perf_counter() - started)

    seed = seed if seed is not None else problem.seed
    if seed is None:
        seed = int(get_setting(config, 'random', 'seed', 0))
    directory = Path(out or problem.output or get_setting(config, 'output', 'directory', 'output'))

    result: Optional[RunResult] = None
    try:
        result = dispatch(verb, problem, seed)
        checks = list(result.checks)
        status = EXIT_OK if result.passed else EXIT_SOLVER
    except ParseError as e:
        logger.error(f"Ошибка файла задачи {problem.name}: {e}")
        return RunSummary(EXIT_PARSE, time.perf_counter() - started)
    except SolverError as e:
        logger.error(f"Решатель завершился с ошибкой: {e}")
        checks = _error_checks(e)
        status = EXIT_SOLVER

    wall_time = time.perf_counter() - started
    checks.append(Check('wall_time', wall_time, '', True))
    outputs = []
    if result is not None:
        outputs.append(write_csv(directory / f"{problem.name}.csv", result.header, result.rows))
    outputs.append(write_csv(directory / f"{problem.name}_report.csv", REPORT_HEADER,
                             [check.row() for check in checks]))

    failed = [check.name for check in checks if not check.passed]
    if failed:
        logger.warning(f"Не пройдены проверки: {', '.join(failed)}")
    logger.info(f"{verb} {problem.name}: код {status}, {wall_time:.2f} с")
    return RunSummary(status, wall_time, checks, outputs)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Главная функция"""
    args = build_parser().parse_args(argv)
    config = load_config()
    level = str(get_setting(config, 'logging', 'level', 'INFO')).upper()
    logging.basicConfig(
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        level=getattr(logging, level, logging.INFO)
    )
    summary = run(args.verb, args.problem, args.out, args.seed, config)
    return summary.exit_status


if __name__ == '__main__':
    sys.exit(main())
