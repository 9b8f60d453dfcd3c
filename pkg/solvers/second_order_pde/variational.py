#!/usr/bin/env python3
"""
Невязка уравнения Эйлера-Лагранжа на сеточной функции
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from core.grids import SpaceGrid

logger = logging.getLogger(__name__)

FD_STEP = 1e-6


@dataclass(frozen=True)
class Lagrangian:
    """
    Лагранжиан L(x, z, u), u = grad z

    Частные производные dz = dL/dz и du = dL/du (вектор на последней оси)
    при отсутствии считаются центральными разностями.
    """

    L: Callable
    dz: Optional[Callable] = None
    du: Optional[Callable] = None

    def partial_z(self, x, z, u) -> np.ndarray:
        if self.dz is not None:
            return np.broadcast_to(np.asarray(self.dz(x, z, u), dtype=float), np.shape(z))
        step = FD_STEP * (1.0 + np.abs(z))
        return (np.asarray(self.L(x, z + step, u)) - np.asarray(self.L(x, z - step, u))) / (2.0 * step)

    def partial_u(self, x, z, u) -> np.ndarray:
        if self.du is not None:
            return np.broadcast_to(np.asarray(self.du(x, z, u), dtype=float), np.shape(u))
        columns = []
        for i in range(u.shape[-1]):
            shift = np.zeros(u.shape[-1])
            shift[i] = 1.0
            step = FD_STEP * (1.0 + np.abs(u[..., i:i + 1]))
            forward = np.asarray(self.L(x, z, u + step * shift))
            backward = np.asarray(self.L(x, z, u - step * shift))
            columns.append((forward - backward) / (2.0 * step[..., 0]))
        return np.stack(columns, axis=-1)


@dataclass(frozen=True)
class ELResidual:
    """
    Args:
        field: dL/dz - div dL/du во внутренних узлах (два слоя от края отброшены)
        max_abs: max |field|
    """

    field: np.ndarray
    max_abs: float


def euler_lagrange_residual(lagrangian: Lagrangian, z: Callable, grid: SpaceGrid) -> ELResidual:
    """
    dL/dz - sum_i d/dx_i [dL/du_i] по центральным разностям

    Args:
        lagrangian: Лагранжиан с частными производными
        z: Кандидат z(x), x формы (..., m)
        grid: Сетка на области D_m
    """
    x = grid.points()
    values = np.broadcast_to(np.asarray(z(x), dtype=float), grid.shape)
    spacing = grid.spacing
    gradient = np.gradient(values, *spacing, edge_order=2)
    if grid.dim == 1:
        gradient = [gradient]
    u = np.stack(gradient, axis=-1)
    flux = lagrangian.partial_u(x, values, u)
    divergence = sum(np.gradient(flux[..., i], spacing[i], axis=i, edge_order=2) for i in range(grid.dim))
    residual = lagrangian.partial_z(x, values, u) - divergence
    interior = tuple(slice(2, -2) for _ in range(grid.dim))
    field = residual[interior]
    max_abs = float(np.max(np.abs(field))) if field.size else 0.0
    logger.debug(f"Невязка Эйлера-Лагранжа: max {max_abs:.3g}")
    return ELResidual(field=field, max_abs=max_abs)
