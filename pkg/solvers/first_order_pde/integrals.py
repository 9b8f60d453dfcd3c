#!/usr/bin/env python3
"""
Проверка первых интегралов векторного поля
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from core.fields import FieldSpec, numerical_gradient
from core.grids import TimeGrid
from solvers.ode_core import solve_ivp

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FirstIntegralReport:
    """
    Невязки первого интеграла

    gradient_residual = max |<du(y), f(y)>| по выборке,
    drift = max |u(y(t)) - u(y(0))| вдоль одной траектории.
    """

    gradient_residual: float
    drift: float
    is_constant: bool
    passed: bool
    note: str = ""


def verify_first_integral(u: Callable, f: FieldSpec, samples, tol: float = 1e-8,
                          gradient: Optional[Callable] = None, horizon: float = 1.0,
                          steps: int = 1000) -> FirstIntegralReport:
    """
    Проверка того, что u - первый интеграл поля f

    Args:
        u: Скалярная функция точек (..., d)
        f: Поле
        samples: Точки выборки (k, d)
        tol: Допуск на обе невязки
        gradient: Градиент u, иначе центральные разности
        horizon: Длина траектории из первой точки выборки
        steps: Число шагов интегрирования траектории
    """
    points = np.atleast_2d(np.asarray(samples, dtype=float))
    grad = gradient(points) if gradient is not None else numerical_gradient(u, points)
    residual = float(np.max(np.abs(np.einsum('...i,...i->...', grad, f(0.0, points)))))

    values = np.broadcast_to(np.asarray(u(points), dtype=float), points.shape[:-1])
    is_constant = bool(np.ptp(values) <= tol and np.max(np.abs(grad)) <= tol)

    trajectory = solve_ivp(f, 0.0, points[0], TimeGrid(0.0, horizon, steps))
    along = np.asarray(u(trajectory.states), dtype=float)
    drift = float(np.max(np.abs(along - along[0])))

    note = "constant (not a first integral)" if is_constant else ""
    if is_constant:
        logger.warning("Функция постоянна на выборке и не является первым интегралом")
    passed = (not is_constant) and residual <= tol and drift <= tol
    return FirstIntegralReport(gradient_residual=residual, drift=drift, is_constant=is_constant,
                               passed=passed, note=note)
