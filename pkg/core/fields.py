#!/usr/bin/env python3
"""
Векторные поля правых частей и численные производные
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

# Шаг центральных разностей относительно масштаба координаты
FD_STEP = 1e-5


def central_difference_jacobian(func: Callable, y: np.ndarray, step: float = FD_STEP) -> np.ndarray:
    """
    Матрица Якоби по четырёхточечной центральной разности

    Args:
        func: Отображение y -> массив формы (..., k) или (...)
        y: Точки формы (..., d)
        step: Относительный шаг, фактический шаг step * (1 + |y_j|)

    Returns:
        np.ndarray: Массив формы (..., k, d) либо (..., d) для скалярной func
    """
    y = np.asarray(y, dtype=float)
    columns = []
    for j in range(y.shape[-1]):
        h = step * (1.0 + np.abs(y[..., j]))
        shift = np.zeros_like(y)

        def at(k):
            shift[..., j] = k * h
            return np.asarray(func(y + shift), dtype=float)

        plus2, plus1, minus1, minus2 = at(2.0), at(1.0), at(-1.0), at(-2.0)
        scale = h if plus1.ndim == h.ndim else h[..., None]
        columns.append((-plus2 + 8.0 * plus1 - 8.0 * minus1 + minus2) / (12.0 * scale))
    return np.stack(columns, axis=-1)


def numerical_gradient(func: Callable, y: np.ndarray, step: float = FD_STEP) -> np.ndarray:
    """Градиент скалярной функции формы (..., d)"""
    return central_difference_jacobian(func, y, step)


@dataclass(frozen=True)
class FieldSpec:
    """
    Правая часть f(t, y) с необязательной аналитической матрицей Якоби

    Состояние лежит на последней оси, ведущие оси - пакет независимых
    точек. t - число либо массив, согласованный с пакетом.
    """

    func: Callable
    dim: int
    jacobian: Optional[Callable] = None
    name: str = "field"

    def __call__(self, t, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return np.broadcast_to(np.asarray(self.func(t, y), dtype=float), y.shape)

    def jac(self, t, y) -> np.ndarray:
        """Матрица Якоби по состоянию формы (..., dim, dim)"""
        y = np.asarray(y, dtype=float)
        if self.jacobian is not None:
            value = np.asarray(self.jacobian(t, y), dtype=float)
            return np.broadcast_to(value, y.shape[:-1] + (self.dim, self.dim))
        return central_difference_jacobian(lambda z: self(t, z), y)

    @classmethod
    def autonomous(cls, func: Callable, dim: int, jacobian: Optional[Callable] = None,
                   name: str = "field") -> 'FieldSpec':
        """Поле, не зависящее от времени: func(y), jacobian(y)"""
        jac = None if jacobian is None else (lambda t, y: jacobian(y))
        return cls(lambda t, y: func(y), dim, jac, name)

    @classmethod
    def linear(cls, matrix, name: str = "linear") -> 'FieldSpec':
        """Линейное поле y -> A y с постоянной матрицей"""
        A = np.atleast_2d(np.asarray(matrix, dtype=float))
        return cls(lambda t, y: np.asarray(y) @ A.T, A.shape[0], lambda t, y: A, name)

    @classmethod
    def constant(cls, vector, name: str = "constant") -> 'FieldSpec':
        """Постоянное поле"""
        c = np.atleast_1d(np.asarray(vector, dtype=float))
        d = c.shape[0]
        return cls(lambda t, y: np.broadcast_to(c, np.shape(y)), d, lambda t, y: np.zeros((d, d)), name)
