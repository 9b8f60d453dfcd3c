#!/usr/bin/env python3
"""
Равномерные сетки по времени и пространству
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from core.errors import DomainError


@dataclass(frozen=True)
class TimeGrid:
    """
    Равномерное разбиение отрезка [t0, t1] на n интервалов

    Args:
        t0: Начало отрезка
        t1: Конец отрезка
        n: Число интервалов
    """

    t0: float
    t1: float
    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise DomainError(f"Число интервалов должно быть целым >= 1, получено {self.n}")
        if not (math.isfinite(self.t0) and math.isfinite(self.t1)):
            raise DomainError(f"Концы сетки должны быть конечны: [{self.t0}, {self.t1}]")
        if not self.t1 > self.t0:
            raise DomainError(f"Требуется t1 > t0, получено [{self.t0}, {self.t1}]")

    @property
    def h(self) -> float:
        """Шаг сетки"""
        return (self.t1 - self.t0) / self.n

    @property
    def nodes(self) -> np.ndarray:
        """Узлы сетки, строго возрастающие"""
        return np.linspace(self.t0, self.t1, self.n + 1)

    def index_of(self, value: float, tol: float = 1e-9) -> Optional[int]:
        """
        Индекс узла, совпадающего с value

        Returns:
            Optional[int]: Индекс или None, если value не узел
        """
        position = (value - self.t0) / self.h
        index = int(round(position))
        if 0 <= index <= self.n and abs(position - index) <= tol * max(1.0, abs(position)):
            return index
        return None

    def refine(self, factor: int) -> 'TimeGrid':
        """Сетка с шагом в factor раз меньше"""
        if factor < 1:
            raise DomainError(f"Множитель измельчения должен быть >= 1, получено {factor}")
        return TimeGrid(self.t0, self.t1, self.n * int(factor))


@dataclass(frozen=True)
class SpaceGrid:
    """
    Прямоугольная равномерная сетка в R^d

    Args:
        lower: Нижние границы по осям
        upper: Верхние границы по осям
        n: Число интервалов по осям
    """

    lower: Tuple[float, ...]
    upper: Tuple[float, ...]
    n: Tuple[int, ...]

    def __post_init__(self):
        lower = tuple(float(v) for v in np.atleast_1d(self.lower))
        upper = tuple(float(v) for v in np.atleast_1d(self.upper))
        counts = tuple(int(v) for v in np.atleast_1d(self.n))
        if not (len(lower) == len(upper) == len(counts)):
            raise DomainError("Размерности границ и числа узлов сетки не совпадают")
        for lo, hi, k in zip(lower, upper, counts):
            if not hi > lo:
                raise DomainError(f"Требуется upper > lower, получено [{lo}, {hi}]")
            if k < 1:
                raise DomainError(f"Число интервалов должно быть >= 1, получено {k}")
        object.__setattr__(self, 'lower', lower)
        object.__setattr__(self, 'upper', upper)
        object.__setattr__(self, 'n', counts)

    @classmethod
    def interval(cls, a: float, b: float, n: int) -> 'SpaceGrid':
        """Одномерная сетка на [a, b]"""
        return cls((a,), (b,), (n,))

    @property
    def dim(self) -> int:
        return len(self.n)

    @property
    def axes(self) -> Tuple[np.ndarray, ...]:
        return tuple(np.linspace(lo, hi, k + 1) for lo, hi, k in zip(self.lower, self.upper, self.n))

    @property
    def spacing(self) -> Tuple[float, ...]:
        return tuple((hi - lo) / k for lo, hi, k in zip(self.lower, self.upper, self.n))

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(k + 1 for k in self.n)

    def points(self) -> np.ndarray:
        """Узлы сетки формы shape + (dim,)"""
        mesh = np.meshgrid(*self.axes, indexing='ij')
        return np.stack(mesh, axis=-1)


def as_nodes(grid) -> np.ndarray:
    """Узлы из TimeGrid или из последовательности чисел"""
    if isinstance(grid, TimeGrid):
        return grid.nodes
    nodes = np.asarray(grid, dtype=float).ravel()
    if nodes.size == 0:
        raise DomainError("Пустой набор узлов")
    if nodes.size > 1 and np.any(np.diff(nodes) <= 0):
        raise DomainError("Узлы должны строго возрастать")
    return nodes


def node_index(nodes: Sequence[float], value: float, tol: float = 1e-9) -> int:
    """
    Индекс узла, совпадающего с value

    Raises:
        DomainError: value не является узлом
    """
    nodes = np.asarray(nodes, dtype=float)
    scale = max(1.0, float(np.max(np.abs(nodes))))
    index = int(np.argmin(np.abs(nodes - value)))
    if abs(nodes[index] - value) > tol * scale:
        raise DomainError(f"Точка {value} не является узлом сетки")
    return index
