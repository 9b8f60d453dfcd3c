#!/usr/bin/env python3
"""
Разделение переменных на отрезке [A, B]

parabolic-dirichlet:   u_t = a^2 u_xx, u(t, A) = u_A, u(t, B) = u_B
hyperbolic-neumann:    u_tt = c^2 u_xx, u_x = 0 на концах
hyperbolic-dirichlet:  u_tt = c^2 u_xx, u(t, A) = u_A, u(t, B) = u_B
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from core.errors import DomainError
from core.grids import as_nodes
from core.quadrature import trapezoid_weights
from core.tables import SolutionTable

logger = logging.getLogger(__name__)

KINDS = ('parabolic-dirichlet', 'hyperbolic-neumann', 'hyperbolic-dirichlet')
COMPATIBILITY_TOL = 1e-8


@dataclass(frozen=True)
class MixedBVP:
    """
    Смешанная задача на отрезке

    Args:
        kind: Тип задачи из KINDS
        interval: (A, B), A < B
        coefficient: a (теплопроводность) или c (скорость волны)
        u_A, u_B: Граничные значения (для Неймана - потоки, только нулевые)
        phi0: Начальные данные phi0(x), x - массив координат
        phi1: Начальная скорость (гиперболические типы)
        modes: Число мод J >= 1
        times: TimeGrid или последовательность моментов
        n_x: Интервалов выходной сетки по x
        n_quad: Интервалов трапеции для коэффициентов
    """

    kind: str
    interval: Tuple[float, float]
    coefficient: float
    phi0: Callable
    times: object
    u_A: float = 0.0
    u_B: float = 0.0
    phi1: Optional[Callable] = None
    modes: int = 32
    n_x: int = 100
    n_quad: int = 1024

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"Неизвестный тип задачи '{self.kind}', допустимые: {', '.join(KINDS)}")
        A, B = (float(v) for v in self.interval)
        if not B > A:
            raise DomainError(f"Требуется A < B, получено [{A}, {B}]")
        object.__setattr__(self, 'interval', (A, B))
        if self.modes < 1:
            raise DomainError(f"Число мод должно быть >= 1, получено {self.modes}")
        if not self.coefficient > 0:
            raise DomainError(f"Коэффициент уравнения должен быть положительным, получено {self.coefficient}")

    @property
    def length(self) -> float:
        return self.interval[1] - self.interval[0]

    def shift(self, x):
        """Аффинная функция с граничными значениями u_A, u_B"""
        A = self.interval[0]
        return self.u_A + (self.u_B - self.u_A) * (np.asarray(x, dtype=float) - A) / self.length


@dataclass(frozen=True)
class FourierSolution:
    """
    Ряд Фурье решения и его значения на сетке

    Args:
        spec: Задача
        table: Значения на (t, x)
        coefficients: 'a', 'b' - коэффициенты при модах 0..J
        eigenvalues: Показатели временных множителей мод
        compatible: Начальные данные согласованы с граничными
    """

    spec: MixedBVP
    table: SolutionTable
    coefficients: Dict[str, np.ndarray]
    eigenvalues: np.ndarray
    compatible: bool = True
    diagnostics: Dict[str, float] = field(default_factory=dict)

    def evaluate(self, t, x) -> np.ndarray:
        return _evaluate(self.spec, self.coefficients, t, x)


def _modes(kind: str, y: np.ndarray, J: int) -> np.ndarray:
    """Ортонормированные моды на [0, 1], форма y.shape + (J + 1,); мода 0 - константа или ноль"""
    j = np.arange(J + 1)
    y = np.asarray(y, dtype=float)[..., None]
    if kind == 'hyperbolic-neumann':
        modes = np.sqrt(2.0) * np.cos(j * np.pi * y)
        modes[..., 0] = 1.0
        return modes
    return np.sqrt(2.0) * np.sin(j * np.pi * y)


def _project(values: np.ndarray, modes: np.ndarray, weights: np.ndarray) -> np.ndarray:
    return (values * weights) @ modes


def _evaluate(spec: MixedBVP, coefficients: Dict[str, np.ndarray], t, x) -> np.ndarray:
    A = spec.interval[0]
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    y = (x - A) / spec.length
    J = spec.modes
    modes = _modes(spec.kind, y, J)
    j = np.arange(J + 1)
    a, b = coefficients['a'], coefficients['b']
    tt = t[..., None]
    if spec.kind == 'parabolic-dirichlet':
        decay = np.exp(-(j * np.pi * spec.coefficient) ** 2 * tt / spec.length ** 2)
        factors = a * decay
        return spec.shift(x) + np.sum(factors * modes, axis=-1)
    scaled = spec.coefficient * tt / spec.length
    factors = a * np.cos(j * np.pi * scaled) + b * np.sin(j * np.pi * scaled)
    if spec.kind == 'hyperbolic-neumann':
        factors[..., 0] = a[0] + b[0] * scaled[..., 0]
        return np.sum(factors * modes, axis=-1)
    return spec.shift(x) + np.sum(factors * modes, axis=-1)


def _initial_data(spec: MixedBVP):
    A, B = spec.interval
    y = np.linspace(0.0, 1.0, spec.n_quad + 1)
    x = A + spec.length * y
    weights = trapezoid_weights(y)
    modes = _modes(spec.kind, y, spec.modes)
    phi0 = np.broadcast_to(np.asarray(spec.phi0(x), dtype=float), x.shape)
    return x, weights, modes, phi0


def _check_compatibility(spec: MixedBVP) -> bool:
    A, B = spec.interval
    gap = max(abs(float(spec.phi0(np.float64(A))) - spec.u_A), abs(float(spec.phi0(np.float64(B))) - spec.u_B))
    if gap > COMPATIBILITY_TOL:
        logger.warning(f"Начальные данные не согласованы с граничными: расхождение {gap:.3g}")
        return False
    return True


def _solution(spec: MixedBVP, coefficients, eigenvalues, compatible: bool, method: str) -> FourierSolution:
    A, B = spec.interval
    nodes = as_nodes(spec.times)
    x = np.linspace(A, B, spec.n_x + 1)
    values = _evaluate(spec, coefficients, nodes[:, None], x[None, :])
    table = SolutionTable((nodes, x), ('t', 'x'), values, method)
    logger.info(f"Задача {spec.kind}: {spec.modes} мод, {len(nodes)} моментов времени")
    return FourierSolution(spec=spec, table=table, coefficients=coefficients, eigenvalues=eigenvalues,
                           compatible=compatible)


def fourier_parabolic_solve(spec: MixedBVP) -> FourierSolution:
    """
    Ряд по модам sqrt(2) sin(j pi y) после сдвига на аффинную функцию

    Множитель моды j: exp(-(j pi a)^2 t / (B - A)^2).
    """
    if spec.kind != 'parabolic-dirichlet':
        raise DomainError("fourier_parabolic_solve принимает только parabolic-dirichlet")
    compatible = _check_compatibility(spec)
    x, weights, modes, phi0 = _initial_data(spec)
    alpha = _project(phi0 - spec.shift(x), modes, weights)
    alpha[0] = 0.0
    j = np.arange(spec.modes + 1)
    eigenvalues = (j * np.pi * spec.coefficient / spec.length) ** 2
    coefficients = {'a': alpha, 'b': np.zeros_like(alpha)}
    return _solution(spec, coefficients, eigenvalues, compatible, "fourier-parabolic")


def fourier_hyperbolic_solve(spec: MixedBVP) -> FourierSolution:
    """
    Волновое уравнение на отрезке в безразмерном времени t' = c t / (B - A)

    Нейман: косинусные моды и дрейф a_0 + b_0 t'; Дирихле: синусные моды
    после аффинного сдвига. a_j = alpha_j, j pi b_j = beta_j, где beta считается
    по phi1 (B - A) / c.

    Raises:
        DomainError: Ненулевой поток на концах для hyperbolic-neumann
    """
    if spec.kind == 'parabolic-dirichlet':
        raise DomainError("fourier_hyperbolic_solve принимает только гиперболические задачи")
    if spec.kind == 'hyperbolic-neumann' and (spec.u_A != 0 or spec.u_B != 0):
        raise DomainError("Поддерживаются только нулевые потоки на концах")
    compatible = True if spec.kind == 'hyperbolic-neumann' else _check_compatibility(spec)
    x, weights, modes, phi0 = _initial_data(spec)
    velocity = np.zeros_like(x) if spec.phi1 is None else \
        np.broadcast_to(np.asarray(spec.phi1(x), dtype=float), x.shape)
    data = phi0 if spec.kind == 'hyperbolic-neumann' else phi0 - spec.shift(x)
    alpha = _project(data, modes, weights)
    beta = _project(velocity * spec.length / spec.coefficient, modes, weights)
    j = np.arange(spec.modes + 1)
    b = np.zeros_like(beta)
    b[1:] = beta[1:] / (j[1:] * np.pi)
    if spec.kind == 'hyperbolic-neumann':
        b[0] = beta[0]
    else:
        alpha[0], b[0] = 0.0, 0.0
    eigenvalues = j * np.pi * spec.coefficient / spec.length
    return _solution(spec, {'a': alpha, 'b': b}, eigenvalues, compatible, f"fourier-{spec.kind}")
