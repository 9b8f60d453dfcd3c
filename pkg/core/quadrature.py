#!/usr/bin/env python3
"""
Квадратурные правила: Гаусс-Лежандр, Гаусс-Эрмит, сфера, накопленная трапеция
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss

from core.errors import DomainError

RULES = ('trapezoid', 'gauss-legendre', 'gauss-hermite', 'sphere')


@dataclass(frozen=True)
class QuadratureSpec:
    """
    Правило квадратуры и число узлов по осям

    Args:
        rule: trapezoid | gauss-legendre | gauss-hermite | sphere
        nodes: Число узлов по каждой оси (для sphere: theta, phi, при необходимости радиус первым)
    """

    rule: str
    nodes: Tuple[int, ...]

    def __post_init__(self):
        if self.rule not in RULES:
            raise DomainError(f"Неизвестное правило квадратуры '{self.rule}', допустимые: {', '.join(RULES)}")
        counts = tuple(int(k) for k in np.atleast_1d(self.nodes))
        if not counts or min(counts) < 2:
            raise DomainError(f"Число узлов квадратуры должно быть >= 2, получено {counts}")
        object.__setattr__(self, 'nodes', counts)


def gauss_legendre(a: float, b: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Узлы и веса Гаусса-Лежандра на [a, b]

    Returns:
        Tuple[np.ndarray, np.ndarray]: (узлы, веса); для b < a веса отрицательны
    """
    x, w = leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def gauss_hermite(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Узлы и веса Гаусса-Эрмита, нормированные на плотность exp(-z^2)/sqrt(pi)

    Сумма весов равна 1, так что sum w f(z) ~ E f(Z), Z ~ N(0, 1/2).
    """
    z, w = hermgauss(n)
    return z, w / np.sqrt(np.pi)


def gauss_hermite_product(n: int, dim: int) -> Tuple[np.ndarray, np.ndarray]:
    """Тензорное произведение правил Гаусса-Эрмита: узлы (n^dim, dim), веса (n^dim,)"""
    z, w = gauss_hermite(n)
    grids = np.meshgrid(*([z] * dim), indexing='ij')
    weights = np.meshgrid(*([w] * dim), indexing='ij')
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    return nodes, np.prod(np.stack([g.ravel() for g in weights], axis=-1), axis=-1)


def sphere_rule(n_theta: int, n_phi: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Правило на единичной сфере S^2

    Гаусс-Лежандр по cos(theta) и равномерная сетка по phi.

    Returns:
        Tuple[np.ndarray, np.ndarray]: Направления (N, 3) и веса (N,), сумма весов 4*pi
    """
    mu, w_mu = leggauss(n_theta)
    phi = (np.arange(n_phi) + 0.5) * (2.0 * np.pi / n_phi)
    sin_theta = np.sqrt(1.0 - mu ** 2)
    directions = np.stack([
        np.outer(sin_theta, np.cos(phi)),
        np.outer(sin_theta, np.sin(phi)),
        np.outer(mu, np.ones_like(phi)),
    ], axis=-1).reshape(-1, 3)
    weights = np.outer(w_mu, np.full(n_phi, 2.0 * np.pi / n_phi)).ravel()
    return directions, weights


def cumulative_integral(values: np.ndarray, nodes: np.ndarray, axis: int = 0, start: int = 0) -> np.ndarray:
    """
    Накопленный интеграл от узла start по равномерной сетке

    Составная трапеция с поправкой Эйлера-Маклорена по концам:
    I(x_i) = T_i - h^2/12 (g'(x_i) - g'(x_start)), производные по
    разностям второго порядка. Для убывающего направления интеграл
    берётся со знаком.

    Args:
        values: Значения подынтегральной функции
        nodes: Узлы сетки вдоль оси axis (равномерные)
        axis: Ось интегрирования
        start: Индекс узла, от которого считается интеграл

    Returns:
        np.ndarray: Массив той же формы, нулевой в узле start
    """
    g = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    x = np.asarray(nodes, dtype=float)
    count = x.shape[0]
    if g.shape[0] != count:
        raise DomainError(f"Число значений {g.shape[0]} не совпадает с числом узлов {count}")
    if count == 1:
        return np.moveaxis(np.zeros_like(g), 0, axis)
    h = x[1] - x[0]
    pieces = 0.5 * h * (g[1:] + g[:-1])
    trap = np.concatenate([np.zeros_like(g[:1]), np.cumsum(pieces, axis=0)], axis=0)
    if count >= 3:
        slope = np.gradient(g, h, axis=0, edge_order=2)
        trap = trap - (h * h / 12.0) * slope
    result = trap - trap[start]
    return np.moveaxis(result, 0, axis)


def trapezoid_weights(nodes: np.ndarray) -> np.ndarray:
    """Веса составной трапеции для произвольных узлов"""
    x = np.asarray(nodes, dtype=float)
    w = np.zeros_like(x)
    dx = np.diff(x)
    w[:-1] += 0.5 * dx
    w[1:] += 0.5 * dx
    return w
