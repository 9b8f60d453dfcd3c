#!/usr/bin/env python3
"""
Проверка принципа максимума на сеточных решениях
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.errors import DomainError
from core.tables import SolutionTable

logger = logging.getLogger(__name__)

KINDS = ('harmonic', 'heat', 'elliptic-A', 'parabolic-A')
SYMMETRY_TOL = 1e-12


def spd_sqrt(A) -> np.ndarray:
    """
    Квадратный корень симметричной положительно определённой матрицы

    A = Q diag(l) Q^T, A^(1/2) = Q diag(sqrt(l)) Q^T.

    Raises:
        DomainError: A не симметрична или не положительно определена
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[0] != A.shape[1]:
        raise DomainError(f"Матрица должна быть квадратной, получено {A.shape}")
    if np.max(np.abs(A - A.T)) > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(A)))):
        raise DomainError("Матрица не симметрична")
    eigenvalues, Q = np.linalg.eigh(A)
    if not eigenvalues.min() > 0:
        raise DomainError(f"Матрица не положительно определена: min собственное значение {eigenvalues.min():.3g}")
    return (Q * np.sqrt(eigenvalues)) @ Q.T


@dataclass(frozen=True)
class MaxPrincipleReport:
    """
    Результат проверки

    Args:
        passed: Максимум и минимум достигаются на (параболической) границе
        max_value, min_value: Экстремумы по всей области
        boundary_max, boundary_min: Экстремумы по границе
        witness: Координаты нарушающего экстремума (или глобального максимума)
        kind: Тип уравнения
        transform: A^(-1/2) для -A типов (координаты свидетеля уже преобразованы)
    """

    passed: bool
    max_value: float
    min_value: float
    boundary_max: float
    boundary_min: float
    witness: np.ndarray
    kind: str
    transform: Optional[np.ndarray] = None


def _boundary_mask(domain: np.ndarray, spatial_axes, time_axis: Optional[int]) -> np.ndarray:
    """Узлы области, у которых есть сосед вне области или край массива по пространственной оси"""
    boundary = np.zeros_like(domain)
    padded = np.pad(domain, 1, constant_values=False)
    core = tuple(slice(1, -1) for _ in domain.shape)
    for axis in spatial_axes:
        for shift in (1, -1):
            neighbour = np.roll(padded, shift, axis=axis)[core]
            boundary |= domain & ~neighbour
    if time_axis is not None:
        initial = np.zeros_like(domain)
        index = [slice(None)] * domain.ndim
        index[time_axis] = 0
        initial[tuple(index)] = True
        boundary |= domain & initial
    return boundary


def max_principle_check(table: SolutionTable, kind: str, A=None, tol: float = 1e-12) -> MaxPrincipleReport:
    """
    Достигаются ли экстремумы таблицы на границе

    Для heat и parabolic-A ось 0 таблицы - время, граница параболическая:
    начальный слой и боковая граница. Область задаётся маской таблицы.

    Raises:
        DomainError: Неизвестный тип или A не SPD
    """
    if kind not in KINDS:
        raise DomainError(f"Неизвестный тип '{kind}', допустимые: {', '.join(KINDS)}")
    values = table.values
    domain = np.ones(values.shape, dtype=bool) if table.mask is None else np.array(table.mask, dtype=bool)
    parabolic = kind in ('heat', 'parabolic-A')
    spatial_axes = range(1, values.ndim) if parabolic else range(values.ndim)
    time_axis = 0 if parabolic else None

    transform = None
    if kind.endswith('-A'):
        if A is None:
            raise DomainError(f"Для типа {kind} нужна матрица A")
        root = spd_sqrt(A)
        if root.shape[0] != len(spatial_axes):
            raise DomainError(f"Размер A {root.shape} не совпадает с числом пространственных осей")
        transform = np.linalg.inv(root)

    boundary = _boundary_mask(domain, spatial_axes, time_axis)
    inside = np.where(domain, values, np.nan)
    on_boundary = np.where(boundary, values, np.nan)
    max_value, min_value = float(np.nanmax(inside)), float(np.nanmin(inside))
    boundary_max, boundary_min = float(np.nanmax(on_boundary)), float(np.nanmin(on_boundary))
    max_ok = boundary_max >= max_value - tol
    min_ok = boundary_min <= min_value + tol
    passed = max_ok and min_ok

    target = np.nanargmin(inside) if max_ok and not min_ok else np.nanargmax(inside)
    index = np.unravel_index(int(target), values.shape)
    witness = np.array([table.axes[k][i] for k, i in enumerate(index)])
    if transform is not None:
        first = 1 if parabolic else 0
        witness[first:] = transform @ witness[first:]
    if not passed:
        logger.info(f"Принцип максимума ({kind}) нарушен во внутреннем узле {witness}")
    return MaxPrincipleReport(passed=passed, max_value=max_value, min_value=min_value,
                              boundary_max=boundary_max, boundary_min=boundary_min,
                              witness=witness, kind=kind, transform=transform)
