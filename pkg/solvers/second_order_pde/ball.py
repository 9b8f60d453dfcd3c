#!/usr/bin/env python3
"""
Гармонические функции в шаре: формула Пуассона и восстановление по нормальной производной
"""

import logging
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from core.errors import DomainError, UnsupportedError
from core.quadrature import gauss_legendre, sphere_rule

logger = logging.getLogger(__name__)

KINDS = ('dirichlet', 'neumann-recovery')
DIRICHLET_SPHERE = (48, 96)
MASS_SPHERE = (64, 128)
MEAN_TOL = 1e-8


@dataclass(frozen=True)
class BallProblem:
    """
    Граничная задача в шаре B(center, radius) в R^3

    Args:
        data: Граничные данные lambda(x), x формы (..., 3) на сфере
        radius: Радиус r > 0
        center: Центр
        kind: dirichlet | neumann-recovery
        dim: Размерность (поддерживается только 3)
    """

    data: Callable
    radius: float = 1.0
    center: Tuple[float, ...] = (0.0, 0.0, 0.0)
    kind: str = 'dirichlet'
    dim: int = 3

    def __post_init__(self):
        if self.dim != 3:
            raise UnsupportedError(f"Поддерживается только размерность 3, получено {self.dim}")
        if self.kind not in KINDS:
            raise DomainError(f"Неизвестный тип задачи '{self.kind}', допустимые: {', '.join(KINDS)}")
        if not self.radius > 0:
            raise DomainError(f"Радиус должен быть положительным, получено {self.radius}")
        object.__setattr__(self, 'center', tuple(float(v) for v in self.center))

    def boundary(self, sphere: Tuple[int, int]):
        """Узлы на сфере, веса dS и значения данных"""
        directions, weights = sphere_rule(*sphere)
        points = np.asarray(self.center) + self.radius * directions
        values = np.broadcast_to(np.asarray(self.data(points), dtype=float), points.shape[:-1])
        return points, weights * self.radius ** 2, values

    def _interior(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        offset = np.linalg.norm(y - np.asarray(self.center), axis=-1)
        if np.any(offset >= self.radius):
            raise DomainError(f"Точка должна лежать строго внутри шара радиуса {self.radius}")
        return y


def poisson_kernel(p: BallProblem, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """P(x, y) = (r^2 - |y - c|^2) / (4 pi r |x - y|^3), x на сфере"""
    c = np.asarray(p.center)
    r = p.radius
    distance = np.linalg.norm(x - y[..., None, :], axis=-1)
    inside = r ** 2 - np.sum((y - c) ** 2, axis=-1)
    return inside[..., None] / (4.0 * np.pi * r * distance ** 3)


def ball_dirichlet_solve(p: BallProblem, y, sphere: Tuple[int, int] = DIRICHLET_SPHERE):
    """
    Гармоническая функция h(y) с h = lambda на сфере

    Returns:
        float или np.ndarray формы y.shape[:-1]

    Raises:
        DomainError: y не лежит строго внутри шара
    """
    y = p._interior(y)
    points, weights, values = p.boundary(sphere)
    h = poisson_kernel(p, points, y) @ (weights * values)
    return float(h) if np.ndim(h) == 0 else h


def poisson_kernel_mass(p: BallProblem, y, sphere: Tuple[int, int] = MASS_SPHERE) -> float:
    """Интеграл ядра Пуассона по сфере (равен 1)"""
    y = p._interior(y)
    points, weights, _ = p.boundary(sphere)
    return float(poisson_kernel(p, points, y) @ weights)


def sphere_mean(p: BallProblem, sphere: Tuple[int, int] = DIRICHLET_SPHERE) -> float:
    """Среднее данных по сфере"""
    _, weights, values = p.boundary(sphere)
    return float(values @ weights) / float(np.sum(weights))


def ball_neumann_recover(p: BallProblem, y, sphere: Tuple[int, int] = DIRICHLET_SPHERE,
                         radial_nodes: int = 16):
    """
    Гармоническая функция с нормальной производной lambda, h(center) = 0

    phi = (x - c) . grad h гармонична и равна r lambda на сфере, поэтому
    h(y) = int_0^1 phi(c + s (y - c)) / s ds; узлы Гаусса-Лежандра не
    задевают s = 0, где phi / s ограничено.

    Raises:
        DomainError: Среднее данных не равно нулю
    """
    mean = sphere_mean(p, sphere)
    _, _, values = p.boundary(sphere)
    scale = max(1.0, float(np.max(np.abs(values))))
    if abs(mean) > MEAN_TOL * scale:
        raise DomainError(f"Среднее данных Неймана по сфере должно быть нулевым, получено {mean:.3g}")
    y = p._interior(y)
    c = np.asarray(p.center)
    s, w = gauss_legendre(0.0, 1.0, radial_nodes)
    inner = c + s[:, None] * (y[..., None, :] - c)
    radial = BallProblem(lambda x: p.radius * np.asarray(p.data(x), dtype=float), p.radius, p.center)
    phi = ball_dirichlet_solve(radial, inner, sphere)
    h = np.sum(np.asarray(phi) * w / s, axis=-1)
    return float(h) if np.ndim(h) == 0 else h


def normal_derivative(evaluate: Callable, p: BallProblem, directions, h: float = 1e-3) -> np.ndarray:
    """Радиальная производная на сфере по трём внутренним точкам (второй порядок)"""
    c = np.asarray(p.center)
    w = np.atleast_2d(np.asarray(directions, dtype=float))
    w = w / np.linalg.norm(w, axis=-1, keepdims=True)
    r = p.radius
    f1 = np.asarray(evaluate(c + (r - h) * w))
    f2 = np.asarray(evaluate(c + (r - 2.0 * h) * w))
    f3 = np.asarray(evaluate(c + (r - 3.0 * h) * w))
    return (5.0 * f1 - 8.0 * f2 + 3.0 * f3) / (2.0 * h)
