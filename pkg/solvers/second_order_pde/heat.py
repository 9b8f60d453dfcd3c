#!/usr/bin/env python3
"""
Уравнение теплопроводности u_t = a^2 lap u в R^n: формула Пуассона
"""

import logging
from typing import Callable, Optional

import numpy as np

from core.errors import DomainError
from core.quadrature import gauss_hermite_product, gauss_legendre

logger = logging.getLogger(__name__)


def _default_nodes(dim: int) -> int:
    return 64 if dim == 1 else 20


def _as_points(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x[None] if x.ndim == 0 else x


def heat_solve(phi: Callable, t: float, x, n_nodes: Optional[int] = None, diffusivity: float = 1.0):
    """
    u(t, x) = (4 pi a^2 t)^(-n/2) int phi(y) exp(-|x - y|^2 / (4 a^2 t)) dy

    Замена y = x + 2a sqrt(t) z сводит интеграл к правилу Гаусса-Эрмита
    (тензорному при n > 1).

    Args:
        phi: Начальные данные phi(y), y формы (..., n)
        t: Время >= 0
        x: Точка (n,) или пакет точек (..., n); число - точка на прямой
        n_nodes: Узлов Гаусса-Эрмита на ось
        diffusivity: a

    Returns:
        float или np.ndarray формы x.shape[:-1]

    Raises:
        DomainError: t < 0
    """
    if t < 0:
        raise DomainError(f"Время должно быть неотрицательным, получено t={t}")
    points = _as_points(x)
    dim = points.shape[-1]
    if t == 0:
        u = np.broadcast_to(np.asarray(phi(points), dtype=float), points.shape[:-1])
    else:
        z, w = gauss_hermite_product(n_nodes or _default_nodes(dim), dim)
        y = points[..., None, :] + 2.0 * diffusivity * np.sqrt(t) * z
        values = np.broadcast_to(np.asarray(phi(y), dtype=float), y.shape[:-1])
        u = values @ w
    u = np.asarray(u, dtype=float)
    return float(u) if u.ndim == 0 else u


def heat_kernel_mass(t: float, x: float = 0.0, n_nodes: int = 64, diffusivity: float = 1.0) -> float:
    """
    Масса ядра теплопроводности на прямой: Гаусс-Лежандр по x +- 8 ширин sqrt(4 a^2 t)

    Raises:
        DomainError: t <= 0
    """
    if not t > 0:
        raise DomainError(f"Время должно быть положительным, получено t={t}")
    width = np.sqrt(4.0 * diffusivity ** 2 * t)
    y, w = gauss_legendre(x - 8.0 * width, x + 8.0 * width, n_nodes)
    kernel = np.exp(-(x - y) ** 2 / (width ** 2)) / np.sqrt(np.pi * width ** 2)
    return float(kernel @ w)
