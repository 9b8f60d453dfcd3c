"""
Пакетный интерфейс: файлы задач, выражения, запуск решателей
"""

from .expressions import compile_derivative, compile_expression, parse_expression, point_function, time_point_function
from .problem_file import ProblemFile, load_problem
from .runners import CONVERGE, SOLVE, VERIFY, Check, RunResult, dispatch

__all__ = [
    'compile_derivative', 'compile_expression', 'parse_expression', 'point_function', 'time_point_function',
    'ProblemFile', 'load_problem',
    'CONVERGE', 'SOLVE', 'VERIFY', 'Check', 'RunResult', 'dispatch',
]
