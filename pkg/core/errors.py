#!/usr/bin/env python3
"""
Иерархия исключений решателей
"""

from typing import Optional, Sequence


class SolverError(Exception):
    """Базовая ошибка всех решателей"""


class DomainError(SolverError, ValueError):
    """Аргументы вне области определения операции"""


class NumericError(SolverError):
    """Сбой численной процедуры (например, собственных значений)"""


class DivergenceError(SolverError):
    """Траектория покинула конечную область"""

    def __init__(self, message: str, last_time: Optional[float] = None, last_state=None):
        super().__init__(message)
        self.last_time = last_time
        self.last_state = last_state


class NonConvergenceError(SolverError):
    """Итерации не сошлись за отведённое число шагов"""

    def __init__(self, message: str, last_gap: Optional[float] = None):
        super().__init__(message)
        self.last_gap = last_gap


class FixedPointError(NonConvergenceError):
    """Итерации неподвижной точки не сжимаются"""


class IntegrityError(SolverError):
    """Нарушен инвариант результата (например, вырожденная матрица)"""


class CausticError(SolverError):
    """Отображение характеристик перестало быть обратимым"""

    def __init__(self, message: str, t: float, x: Sequence[float]):
        super().__init__(message)
        self.t = float(t)
        self.x = tuple(float(v) for v in x)


class StripError(SolverError):
    """Нарушено условие совместности полос"""


class HypothesisError(SolverError):
    """Не выполнены условия теоремы, на которой основан метод"""


class UnsupportedError(SolverError):
    """Постановка вне поддерживаемого класса задач"""


class OrderLimitError(SolverError):
    """Рациональные коэффициенты ряда выросли сверх допустимого"""


class ParseError(ValueError):
    """Ошибка разбора файла задачи или выражения"""
