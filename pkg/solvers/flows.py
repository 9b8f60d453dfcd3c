#!/usr/bin/env python3
"""
Локальные потоки автономных векторных полей

Поток и его матрица Якоби (уравнения в вариациях), скобка Ли,
проверка коммутирования (теорема Фробениуса), композиция потоков
градиентной системы и проверка сохранения объёма.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from core.errors import DivergenceError, DomainError, IntegrityError
from core.fields import FieldSpec
from solvers.ode_core import rk4_step

logger = logging.getLogger(__name__)

DEFAULT_STEPS = 400


@dataclass(frozen=True)
class FlowMap:
    """
    Локальный поток поля Y

    Args:
        field: Порождающее поле (автономное)
        steps: Число шагов RK4 на отрезке [0, t]
        max_time: Наибольшее допустимое |t|
    """

    field: FieldSpec
    steps: int = DEFAULT_STEPS
    max_time: Optional[float] = None

    def __call__(self, t, x) -> np.ndarray:
        return flow(self.field, t, x, steps=self.steps, max_time=self.max_time)

    def jacobian(self, t, x) -> np.ndarray:
        return flow_jacobian(self.field, t, x, steps=self.steps)


@dataclass(frozen=True)
class FlowJacobian:
    """Состояние потока, его матрица Якоби и сопряжённая (обратная) матрица"""

    state: np.ndarray
    jacobian: np.ndarray
    adjoint: np.ndarray

    @property
    def identity_residual(self) -> float:
        eye = np.eye(self.jacobian.shape[-1])
        return float(np.max(np.abs(self.adjoint @ self.jacobian - eye)))


def _batch_times(t, batch_shape: Tuple[int, ...]) -> np.ndarray:
    times = np.asarray(t, dtype=float)
    return np.broadcast_to(times, batch_shape)


def flow(Y: FieldSpec, t, x, steps: int = DEFAULT_STEPS, max_time: Optional[float] = None) -> np.ndarray:
    """
    Значение потока G(t)[x]

    Интегрируется dz/ds = t Y(z) на s в [0, 1], поэтому отрицательное t
    означает обращённое поле, а пакет точек может иметь свои времена.

    Args:
        Y: Автономное поле
        t: Время (число или массив формы пакета)
        x: Точка (d,) или пакет (..., d)
        steps: Число шагов RK4
        max_time: Ограничение на |t|

    Raises:
        DomainError: |t| > max_time
        DivergenceError: Траектория ушла в бесконечность
    """
    x = np.asarray(x, dtype=float)
    times = _batch_times(t, x.shape[:-1])
    if max_time is not None and np.any(np.abs(times) > max_time):
        raise DomainError(f"Время потока превышает допустимое {max_time}")
    if not np.any(times):
        return x.copy()
    scale = times[..., None]

    def rhs(s, z):
        return scale * Y(0.0, z)

    z = x
    h = 1.0 / steps
    for k in range(steps):
        z = rk4_step(rhs, k * h, z, h)
    if not np.all(np.isfinite(z)):
        logger.error(f"Поток поля {Y.name} разошёлся")
        raise DivergenceError(f"Поток поля {Y.name} разошёлся")
    return z


def flow_jacobian_pair(Y: FieldSpec, t, lam, steps: int = DEFAULT_STEPS) -> FlowJacobian:
    """
    Поток вместе с уравнениями в вариациях

    dZ/ds = t dY(z) Z, Z(0) = I и сопряжённая dH/ds = -t H dY(z), H(0) = I,
    так что H Z = I вдоль всей траектории.
    """
    lam = np.asarray(lam, dtype=float)
    d = lam.shape[-1]
    times = _batch_times(t, lam.shape[:-1])
    scale = times[..., None]
    scale_m = times[..., None, None]
    eye = np.broadcast_to(np.eye(d), lam.shape[:-1] + (d, d))

    def rhs(s, state):
        z, Z, H = state
        J = Y.jac(0.0, z)
        return (scale * Y(0.0, z), scale_m * (J @ Z), -scale_m * (H @ J))

    state = (lam, eye.copy(), eye.copy())
    h = 1.0 / steps
    for k in range(steps):
        state = _rk4_tuple(rhs, k * h, state, h)
    z, Z, H = state
    if not (np.all(np.isfinite(z)) and np.all(np.isfinite(Z))):
        raise DivergenceError(f"Поток поля {Y.name} разошёлся")
    return FlowJacobian(state=z, jacobian=Z, adjoint=H)


def _rk4_tuple(rhs, s, state, h):
    def add(a, b, c):
        return tuple(x + c * y for x, y in zip(a, b))

    k1 = rhs(s, state)
    k2 = rhs(s + 0.5 * h, add(state, k1, 0.5 * h))
    k3 = rhs(s + 0.5 * h, add(state, k2, 0.5 * h))
    k4 = rhs(s + h, add(state, k3, h))
    return tuple(x + (h / 6.0) * (a + 2.0 * b + 2.0 * c + d) for x, a, b, c, d in zip(state, k1, k2, k3, k4))


def flow_jacobian(Y: FieldSpec, t, lam, steps: int = DEFAULT_STEPS, det_tol: float = 1e-12) -> np.ndarray:
    """
    Матрица Якоби потока по начальной точке

    Raises:
        IntegrityError: Матрица вырождена
    """
    result = flow_jacobian_pair(Y, t, lam, steps)
    dets = np.linalg.det(result.jacobian)
    if np.any(np.abs(dets) <= det_tol):
        raise IntegrityError(f"Матрица Якоби потока поля {Y.name} вырождена")
    return result.jacobian


def lie_bracket(Y1: FieldSpec, Y2: FieldSpec, x) -> np.ndarray:
    """
    Скобка Ли [Y1, Y2](x) = dY1(x) Y2(x) - dY2(x) Y1(x)
    """
    x = np.asarray(x, dtype=float)
    first = np.einsum('...ij,...j->...i', Y1.jac(0.0, x), Y2(0.0, x))
    second = np.einsum('...ij,...j->...i', Y2.jac(0.0, x), Y1(0.0, x))
    return first - second


@dataclass(frozen=True)
class CommutationReport:
    """Результат проверки попарного коммутирования полей"""

    passed: bool
    worst_value: float
    worst_pair: Tuple[int, int]
    worst_point: np.ndarray


def commutation_test(fields: Sequence[FieldSpec], sample_box: Tuple[Sequence[float], Sequence[float]],
                     tol: float = 1e-7, n_samples: int = 64, seed: int = 0) -> CommutationReport:
    """
    Проверка [Y_i, Y_j] = 0 на случайных точках прямоугольника

    Args:
        fields: Не менее двух полей
        sample_box: (нижний угол, верхний угол)
        tol: Допуск на норму скобки
        n_samples: Число случайных точек (плюс углы и центр)
        seed: Зерно генератора точек
    """
    fields = list(fields)
    if len(fields) < 2:
        raise DomainError("Для проверки коммутирования нужно не менее двух полей")
    lower = np.asarray(sample_box[0], dtype=float)
    upper = np.asarray(sample_box[1], dtype=float)
    rng = np.random.default_rng(seed)
    points = [lower + (upper - lower) * rng.random((n_samples, lower.shape[0])),
              np.stack([lower, upper, 0.5 * (lower + upper)])]
    points = np.concatenate(points, axis=0)

    worst_value, worst_pair, worst_point = -1.0, (0, 1), points[0]
    for i in range(len(fields)):
        for j in range(i + 1, len(fields)):
            norms = np.linalg.norm(lie_bracket(fields[i], fields[j], points), axis=-1)
            k = int(np.argmax(norms))
            if norms[k] > worst_value:
                worst_value, worst_pair, worst_point = float(norms[k]), (i, j), points[k]
    passed = worst_value <= tol
    if not passed:
        logger.info(f"Поля {worst_pair} не коммутируют: |[Y_i, Y_j]| = {worst_value:.3g} в точке {worst_point}")
    return CommutationReport(passed=passed, worst_value=worst_value, worst_pair=worst_pair, worst_point=worst_point)


@dataclass(frozen=True)
class OrbitSpec:
    """
    Орбита G(p; x0) = G_1(t_1) o ... o G_m(t_m)(x0)

    Args:
        fields: Поля Y_1..Y_m
        half_widths: Полуширины a_i параметрического бруса
        base_point: Точка x0
    """

    fields: Tuple[FieldSpec, ...]
    half_widths: Tuple[float, ...]
    base_point: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'fields', tuple(self.fields))
        object.__setattr__(self, 'half_widths', tuple(float(a) for a in self.half_widths))
        object.__setattr__(self, 'base_point', np.asarray(self.base_point, dtype=float))
        if not self.fields:
            raise DomainError("Орбита требует хотя бы одного поля")
        if len(self.half_widths) != len(self.fields) or min(self.half_widths) <= 0:
            raise DomainError("Полуширины параметрического бруса должны быть положительны для каждого поля")


def orbit(spec: OrbitSpec, p: Sequence[float], steps: int = DEFAULT_STEPS) -> np.ndarray:
    """
    Композиция потоков справа налево: сначала G_m(t_m), последним G_1(t_1)
    """
    params = np.asarray(p, dtype=float)
    if params.shape != (len(spec.fields),):
        raise DomainError(f"Ожидалось {len(spec.fields)} параметров, получено {params.shape}")
    if np.any(np.abs(params) >= np.asarray(spec.half_widths)):
        raise DomainError(f"Параметры {params} вне бруса {spec.half_widths}")
    x = spec.base_point
    for Y, t in reversed(list(zip(spec.fields, params))):
        x = flow(Y, t, x, steps=steps)
    return x


@dataclass(frozen=True)
class VolumeReport:
    """Отклонение определителя матрицы Якоби потока от 1 и измеренная дивергенция"""

    max_det_deviation: float
    max_divergence: float
    determinants: np.ndarray
    passed: bool


def volume_preservation_check(Y: FieldSpec, t: float, sample_points, tol: float = 1e-8,
                              steps: int = DEFAULT_STEPS) -> VolumeReport:
    """
    Проверка det dG(t)[x] = 1 на выборке точек
    """
    points = np.atleast_2d(np.asarray(sample_points, dtype=float))
    dets = np.linalg.det(flow_jacobian_pair(Y, t, points, steps).jacobian)
    divergence = np.trace(Y.jac(0.0, points), axis1=-2, axis2=-1)
    deviation = float(np.max(np.abs(dets - 1.0)))
    max_div = float(np.max(np.abs(divergence)))
    passed = deviation <= tol and max_div <= tol
    logger.info(f"Сохранение объёма полем {Y.name}: |det-1| <= {deviation:.3g}, |div| <= {max_div:.3g}")
    return VolumeReport(max_det_deviation=deviation, max_divergence=max_div, determinants=dets, passed=passed)
