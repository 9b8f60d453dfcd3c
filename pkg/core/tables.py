#!/usr/bin/env python3
"""
Таблицы результатов: траектории и сеточные решения
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np


def _frozen(array) -> np.ndarray:
    result = np.array(array, dtype=float, copy=True)
    result.setflags(write=False)
    return result


@dataclass(frozen=True)
class TrajectoryTable:
    """
    Траектория на сетке узлов

    Args:
        times: Узлы (N,)
        states: Состояния (N, ..., d); строка начального узла совпадает с данными Коши
        method: Метка метода
        diagnostics: Счётчики итераций, флаги и прочие сведения
    """

    times: np.ndarray
    states: np.ndarray
    method: str
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'times', _frozen(self.times))
        object.__setattr__(self, 'states', _frozen(self.states))

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def at(self, t: float) -> np.ndarray:
        """Состояние в узле t"""
        index = int(np.argmin(np.abs(self.times - t)))
        return self.states[index]

    def header(self, prefix: str = "y") -> List[str]:
        width = int(np.prod(self.states.shape[1:]))
        return ["t"] + [f"{prefix}{i + 1}" for i in range(width)]

    def to_rows(self) -> List[List[float]]:
        flat = self.states.reshape(self.states.shape[0], -1)
        return [[t] + list(row) for t, row in zip(self.times, flat)]


@dataclass(frozen=True)
class SolutionTable:
    """
    Значения решения на прямоугольной сетке

    Args:
        axes: Узлы по осям
        names: Имена осей
        values: Значения формы (len(axes[0]), len(axes[1]), ...)
        method: Метка метода
        mask: Необязательная маска области (True - узел внутри)
        diagnostics: Невязки, числа итераций и прочее
    """

    axes: Tuple[np.ndarray, ...]
    names: Tuple[str, ...]
    values: np.ndarray
    method: str
    mask: Optional[np.ndarray] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'axes', tuple(_frozen(a) for a in self.axes))
        object.__setattr__(self, 'values', _frozen(self.values))
        if self.mask is not None:
            mask = np.array(self.mask, dtype=bool, copy=True)
            mask.setflags(write=False)
            object.__setattr__(self, 'mask', mask)
        expected = tuple(len(a) for a in self.axes)
        if self.values.shape[:len(expected)] != expected:
            raise ValueError(f"Форма значений {self.values.shape} не согласована с осями {expected}")

    def header(self, value_names: Sequence[str] = ("value",)) -> List[str]:
        return list(self.names) + list(value_names)

    def to_rows(self) -> List[List[float]]:
        """Строки (координаты..., значение...) в порядке C, только узлы маски"""
        mesh = np.meshgrid(*self.axes, indexing='ij')
        coords = np.stack([m.ravel() for m in mesh], axis=-1)
        count = coords.shape[0]
        values = self.values.reshape(count, -1)
        keep = np.ones(count, dtype=bool) if self.mask is None else self.mask.ravel()
        return [list(c) + list(v) for c, v, k in zip(coords, values, keep) if k]
