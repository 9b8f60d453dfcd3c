#!/usr/bin/env python3
"""
Ньютонов потенциал плотности в шаре B(0, R)
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from core.errors import DomainError
from core.quadrature import QuadratureSpec, gauss_legendre, sphere_rule

logger = logging.getLogger(__name__)

DEFAULT_QUADRATURE = QuadratureSpec('sphere', (32, 24, 48))
FD_STEP = 0.05


@dataclass(frozen=True)
class PotentialReport:
    """
    Значения потенциала и проверка уравнения Пуассона

    Args:
        values: u(P) в точках
        residual: |lap u + 4 pi rho| в точках (nan для пропущенных)
        relative_residual: max residual / max |4 pi rho|
        skipped: Индексы точек, слишком близких к границе шара
    """

    values: np.ndarray
    residual: np.ndarray
    relative_residual: float
    skipped: List[int] = field(default_factory=list)


def _ray_limits(P: np.ndarray, directions: np.ndarray, R: float):
    """Отрезок [r_lo, r_hi] луча P + r w внутри шара; пустой при r_hi <= r_lo"""
    proj = np.einsum('...i,ki->...k', P, directions)
    disc = proj ** 2 - np.sum(P ** 2, axis=-1)[..., None] + R ** 2
    root = np.sqrt(np.maximum(disc, 0.0))
    lo = np.maximum(-proj - root, 0.0)
    hi = np.where(disc > 0, -proj + root, 0.0)
    return lo, np.maximum(hi, lo)


def potential_values(rho: Callable, points, quad: QuadratureSpec = DEFAULT_QUADRATURE, R: float = 1.0) -> np.ndarray:
    """
    u(P) = int_B rho(y) / |y - P| dy

    Сферические координаты с центром в P: dy = r^2 dr dw, и особенность
    1/r поглощается якобианом. Радиальная часть - Гаусс-Лежандр на отрезке
    луча внутри шара.
    """
    if quad.rule != 'sphere' or len(quad.nodes) != 3:
        raise DomainError("Для потенциала нужна квадратура 'sphere' с узлами (радиус, theta, phi)")
    P = np.atleast_2d(np.asarray(points, dtype=float))
    n_r, n_theta, n_phi = quad.nodes
    directions, w_dir = sphere_rule(n_theta, n_phi)
    s, w_s = gauss_legendre(0.0, 1.0, n_r)
    lo, hi = _ray_limits(P, directions, R)
    length = hi - lo
    r = lo[..., None] + length[..., None] * s
    y = P[:, None, None, :] + r[..., None] * directions[None, :, None, :]
    density = np.broadcast_to(np.asarray(rho(y), dtype=float), y.shape[:-1])
    radial = np.sum(density * r * w_s, axis=-1) * length
    return radial @ w_dir


def _laplacian(rho: Callable, P: np.ndarray, quad: QuadratureSpec, R: float, h: float) -> np.ndarray:
    """Лапласиан по пятиточечной схеме четвёртого порядка вдоль каждой оси"""
    center = potential_values(rho, P, quad, R)
    total = np.zeros(P.shape[0])
    for axis in range(3):
        shift = np.zeros(3)
        shift[axis] = h
        values = {k: potential_values(rho, P + k * shift, quad, R) for k in (-2, -1, 1, 2)}
        total += (-values[2] + 16.0 * values[1] - 30.0 * center + 16.0 * values[-1] - values[-2]) / (12.0 * h * h)
    return total


def newtonian_potential(rho: Callable, points, quad: Optional[QuadratureSpec] = None, R: float = 1.0,
                        h: float = FD_STEP) -> PotentialReport:
    """
    Потенциал в точках и невязка lap u = -4 pi rho

    Точки, у которых разностный шаблон выходит за шар (|P| + 2h >= R), пропускаются.

    Args:
        rho: Плотность, равная нулю вне B(0, R)
        points: Точки (k, 3)
        quad: sphere-квадратура (радиус, theta, phi)
        R: Радиус носителя
        h: Шаг разностного лапласиана
    """
    quad = quad or DEFAULT_QUADRATURE
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.shape[-1] != 3:
        raise DomainError(f"Ожидались точки в R^3, получена форма {P.shape}")
    values = potential_values(rho, P, quad, R)

    residual = np.full(P.shape[0], np.nan)
    skipped = [i for i in range(P.shape[0]) if np.linalg.norm(P[i]) + 2.0 * h >= R]
    for i in skipped:
        logger.info(f"Точка {P[i]} слишком близко к границе шара, невязка не считается")
    checked = [i for i in range(P.shape[0]) if i not in skipped]
    relative = 0.0
    if checked:
        Q = P[checked]
        target = -4.0 * np.pi * np.broadcast_to(np.asarray(rho(Q), dtype=float), Q.shape[:-1])
        residual[checked] = np.abs(_laplacian(rho, Q, quad, R, h) - target)
        scale = float(np.max(np.abs(target)))
        relative = float(np.max(residual[checked])) / scale if scale > 0 else float(np.max(residual[checked]))
    logger.info(f"Ньютонов потенциал в {P.shape[0]} точках, относительная невязка {relative:.3g}")
    return PotentialReport(values=values, residual=residual, relative_residual=relative, skipped=skipped)
