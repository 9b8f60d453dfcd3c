#!/usr/bin/env python3
"""
Неявные скалярные уравнения y = x a(y') + b(y') (Клеро при a(z) = z, иначе Лагранж)

Характеристическая система для F(x, y, z) = x a(z) + b(z) - y:
    dx/dt = x a'(z) + b'(z)
    dy/dt = z (x a'(z) + b'(z))
    dz/dt = z - a(z)
F сохраняется вдоль решений, а там, где dx/dt != 0, dy/dx = z.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Sequence

import numpy as np

from core.errors import DomainError
from core.grids import TimeGrid
from core.tables import TrajectoryTable
from solvers.ode_core import integrate_nodes

logger = logging.getLogger(__name__)

CONSISTENCY_TOL = 1e-8
FOLD_TOL = 1e-12


@dataclass(frozen=True)
class ClairautCurve:
    """
    Параметрическая кривая (x(t), y(t), z(t))

    Args:
        table: Траектория, столбцы x, y, z
        residual: max |y - x a(z) - b(z)| вдоль кривой
        slope_residual: max |dy/dx - z| на монотонных по x участках
        folds: Моменты, где dx/dt обращается в нуль
        stationary: z неподвижна (z0 - a(z0) = 0)
    """

    table: TrajectoryTable
    residual: float
    slope_residual: float
    folds: List[float] = field(default_factory=list)
    stationary: bool = False


def _monotone_segments(speed: np.ndarray) -> List[slice]:
    """Участки, где знак dx/dt постоянен и dx/dt не мало"""
    segments = []
    start = None
    sign = 0
    for i, v in enumerate(speed):
        s = 0 if abs(v) <= FOLD_TOL else int(np.sign(v))
        if s != 0 and s == sign:
            continue
        if start is not None and i - start >= 3:
            segments.append(slice(start, i))
        start, sign = (i, s) if s != 0 else (None, 0)
    if start is not None and len(speed) - start >= 3:
        segments.append(slice(start, len(speed)))
    return segments


def solve_clairaut(a: Callable, b: Callable, da: Callable, db: Callable, init: Sequence[float],
                   grid: TimeGrid) -> ClairautCurve:
    """
    Интегрирование характеристической системы от (x0, y0, z0) в момент grid.t0

    Args:
        a, b: Коэффициенты уравнения
        da, db: Их производные
        init: (x0, y0, z0)
        grid: Сетка по параметру t

    Raises:
        DomainError: Начальная точка не лежит на F = 0 или dx/dt(0) = 0
    """
    x0, y0, z0 = (float(v) for v in init)
    mismatch = abs(x0 * a(z0) + b(z0) - y0)
    if mismatch > CONSISTENCY_TOL:
        raise DomainError(f"Начальная точка не удовлетворяет уравнению: |x a(z) + b(z) - y| = {mismatch:.3g}")
    speed0 = x0 * da(z0) + db(z0)
    if abs(speed0) <= FOLD_TOL:
        raise DomainError(f"x0 a'(z0) + b'(z0) = 0 в начальной точке ({x0}, {z0})")
    stationary = abs(z0 - a(z0)) <= CONSISTENCY_TOL
    if stationary:
        logger.info(f"z неподвижна: z0 - a(z0) = 0 при z0 = {z0}")

    def rhs(t, state):
        x, z = state[0], state[2]
        speed = x * da(z) + db(z)
        dz = 0.0 if stationary else z - a(z)
        return np.array([speed, z * speed, dz], dtype=float)

    nodes = grid.nodes
    states = integrate_nodes(rhs, nodes, np.array([x0, y0, z0]))
    x, y, z = states[:, 0], states[:, 1], states[:, 2]
    residual = float(np.max(np.abs(y - x * a(z) - b(z))))

    speed = x * da(z) + db(z)
    folds = [float(nodes[i]) for i in range(1, len(nodes))
             if abs(speed[i]) <= FOLD_TOL or np.sign(speed[i]) != np.sign(speed[i - 1])]
    if folds:
        logger.warning(f"dx/dt обращается в нуль (складка) при t = {folds[0]:.6g}")

    slope_residual = 0.0
    for segment in _monotone_segments(speed):
        slope = np.gradient(y[segment], x[segment], edge_order=2)
        slope_residual = max(slope_residual, float(np.max(np.abs(slope - z[segment]))))

    table = TrajectoryTable(nodes, states, "clairaut-characteristics",
                            diagnostics={'residual': residual, 'slope_residual': slope_residual,
                                         'folds': folds, 'stationary': stationary})
    logger.info(f"Кривая построена: |F| <= {residual:.3g}, |dy/dx - z| <= {slope_residual:.3g}")
    return ClairautCurve(table=table, residual=residual, slope_residual=slope_residual,
                         folds=folds, stationary=stationary)
