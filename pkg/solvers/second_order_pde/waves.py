#!/usr/bin/env python3
"""
Волновое уравнение u_tt = c0^2 lap u в R^1, R^2, R^3

Формулы Даламбера, Пуассона (плоскость), Кирхгофа и интеграл Дюамеля
для правой части. Производная по t внутри формул берётся центральной
разностью четвёртого порядка с шагом t/100.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from core.errors import DomainError
from core.quadrature import gauss_legendre, sphere_rule, trapezoid_weights

logger = logging.getLogger(__name__)

GL_NODES = 64
SPHERE_NODES = (32, 64)
DERIVATIVE_FRACTION = 0.01


@dataclass(frozen=True)
class WaveProblem:
    """
    Задача Коши для волнового уравнения

    Args:
        dim: Размерность пространства 1, 2 или 3
        c0: Скорость волны > 0
        u0: Начальное смещение u0(x), x формы (..., dim)
        u1: Начальная скорость u1(x)
        f: Правая часть f(t, x) либо None
    """

    dim: int
    c0: float
    u0: Callable
    u1: Callable
    f: Optional[Callable] = None

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise DomainError(f"Размерность волновой задачи должна быть 1, 2 или 3, получено {self.dim}")
        if not self.c0 > 0:
            raise DomainError(f"Скорость волны должна быть положительной, получено {self.c0}")


def _values(func: Callable, points: np.ndarray) -> np.ndarray:
    return np.broadcast_to(np.asarray(func(points), dtype=float), points.shape[:-1])


def _source(f: Callable, t, points: np.ndarray) -> np.ndarray:
    return np.broadcast_to(np.asarray(f(t, points), dtype=float), points.shape[:-1])


def _time_derivative(func: Callable[[float], float], t: float) -> float:
    """Центральная разность четвёртого порядка с шагом t/100"""
    h = DERIVATIVE_FRACTION * t
    return (-func(t + 2 * h) + 8.0 * func(t + h) - 8.0 * func(t - h) + func(t - 2 * h)) / (12.0 * h)


def _require_positive(t: float):
    if not t > 0:
        raise DomainError(f"Время должно быть положительным, получено t={t}")


def dalembert_solve(p: WaveProblem, t: float, x, n_nodes: int = GL_NODES):
    """
    Формула Даламбера; при наличии f добавляется одномерный интеграл Дюамеля

    Returns:
        float или np.ndarray формы x
    """
    if p.dim != 1:
        raise DomainError("dalembert_solve работает только при dim=1")
    c = p.c0
    x = np.asarray(x, dtype=float)
    xs = x[..., None]
    u = 0.5 * (_values(p.u0, (xs + c * t)[..., None]) + _values(p.u0, (xs - c * t)[..., None]))[..., 0]
    if t != 0:
        s, w = gauss_legendre(-1.0, 1.0, n_nodes)
        nodes = xs + c * t * s
        u = u + 0.5 * t * np.sum(_values(p.u1, nodes[..., None]) * w, axis=-1)
    if p.f is not None and t != 0:
        u = u + _duhamel_1d(p, t, xs, n_nodes)
    return float(u) if u.ndim == 0 else u


def _duhamel_1d(p: WaveProblem, t: float, xs: np.ndarray, n_nodes: int) -> np.ndarray:
    """(1/2c) int_0^t int_{x - c(t-s)}^{x + c(t-s)} f(s, y) dy ds"""
    c = p.c0
    taus, w_tau = gauss_legendre(0.0, t, n_nodes)
    s, w = gauss_legendre(-1.0, 1.0, n_nodes)
    total = np.zeros(xs.shape[:-1])
    for tau, wt in zip(taus, w_tau):
        half = c * (t - tau)
        nodes = xs + half * s
        total = total + wt * 0.5 * (t - tau) * np.sum(_source(p.f, tau, nodes[..., None]) * w, axis=-1)
    return total


def _disk_integral(g: Callable, center: np.ndarray, c: float, t: float, n_alpha: int, n_phi: int) -> float:
    """int_0^{2pi} int_0^{pi/2} g(P + ct sin a (cos phi, sin phi)) ct sin a da dphi"""
    alpha, w_alpha = gauss_legendre(0.0, 0.5 * np.pi, n_alpha)
    phi = (np.arange(n_phi) + 0.5) * (2.0 * np.pi / n_phi)
    radius = c * t * np.sin(alpha)
    offsets = radius[:, None, None] * np.stack([np.cos(phi), np.sin(phi)], axis=-1)[None, :, :]
    values = _values(g, center + offsets)
    return float(np.sum(values * (radius * w_alpha)[:, None]) * (2.0 * np.pi / n_phi))


def wave2d_poisson_solve(p: WaveProblem, t: float, x: float, y: float,
                         n_alpha: int = 48, n_phi: int = 64) -> float:
    """
    Формула Пуассона на плоскости

    Замена rho = c0 t sin(alpha) снимает особенность 1/sqrt(c0^2 t^2 - rho^2).

    Raises:
        DomainError: t <= 0
    """
    if p.dim != 2:
        raise DomainError("wave2d_poisson_solve работает только при dim=2")
    _require_positive(t)
    c = p.c0
    center = np.array([x, y], dtype=float)
    first = _time_derivative(lambda s: _disk_integral(p.u0, center, c, s, n_alpha, n_phi), t)
    second = _disk_integral(p.u1, center, c, t, n_alpha, n_phi)
    return (first + second) / (2.0 * np.pi * c)


def _sphere_mean(g: Callable, center: np.ndarray, radius: float, directions: np.ndarray,
                 weights: np.ndarray) -> float:
    return float(_values(g, center + radius * directions) @ weights) / (4.0 * np.pi)


def kirchhoff_solve(p: WaveProblem, t: float, P: Sequence[float], sphere=SPHERE_NODES) -> float:
    """
    Формула Кирхгофа u = d/dt (t M_{ct}[u0]) + t M_{ct}[u1], M - среднее по сфере

    При наличии правой части добавляется duhamel_solve.

    Raises:
        DomainError: t <= 0
    """
    if p.dim != 3:
        raise DomainError("kirchhoff_solve работает только при dim=3")
    _require_positive(t)
    c = p.c0
    center = np.asarray(P, dtype=float)
    directions, weights = sphere_rule(*sphere)
    first = _time_derivative(lambda s: s * _sphere_mean(p.u0, center, c * s, directions, weights), t)
    second = t * _sphere_mean(p.u1, center, c * t, directions, weights)
    u = first + second
    if p.f is not None:
        u += duhamel_solve(p, t, center)
    return u


def duhamel_solve(p: WaveProblem, t: float, P: Sequence[float], radial: int = 32, sphere=(16, 32)) -> float:
    """
    Запаздывающий потенциал
    u = 1/(4 pi c^2) int_0^{ct} r dr int_{S^2} f(t - r/c, P + r w) dw

    Raises:
        DomainError: t <= 0
    """
    if p.dim != 3:
        raise DomainError("duhamel_solve работает только при dim=3")
    _require_positive(t)
    if p.f is None:
        return 0.0
    c = p.c0
    center = np.asarray(P, dtype=float)
    directions, weights = sphere_rule(*sphere)
    r, w_r = gauss_legendre(0.0, c * t, radial)
    total = 0.0
    for radius, wr in zip(r, w_r):
        shell = _source(p.f, t - radius / c, center + radius * directions) @ weights
        total += wr * radius * shell
    return float(total) / (4.0 * np.pi * c * c)


def evaluator(p: WaveProblem) -> Callable[[float, np.ndarray], float]:
    """Решение как функция (t, точка) для выбранной размерности"""
    if p.dim == 1:
        return lambda t, P: float(dalembert_solve(p, t, float(np.asarray(P).ravel()[0])))
    if p.dim == 2:
        return lambda t, P: wave2d_poisson_solve(p, t, *np.asarray(P, dtype=float))
    return lambda t, P: kirchhoff_solve(p, t, P)


def wave_residual(evaluate: Callable, c0: float, t: float, point: Sequence[float], h: float) -> float:
    """
    Разностная невязка u_tt - c0^2 lap u в точке (t, point) с шагом h
    """
    P = np.asarray(point, dtype=float)
    center = evaluate(t, P)
    u_tt = (evaluate(t + h, P) - 2.0 * center + evaluate(t - h, P)) / (h * h)
    lap = 0.0
    for axis in range(P.shape[0]):
        shift = np.zeros_like(P)
        shift[axis] = h
        lap += (evaluate(t, P + shift) - 2.0 * center + evaluate(t, P - shift)) / (h * h)
    return float(u_tt - c0 * c0 * lap)


def observed_order(steps: Sequence[float], residuals: Sequence[float]) -> float:
    """Наклон log|невязки| по log h"""
    slope, _ = np.polyfit(np.log(np.asarray(steps, dtype=float)),
                          np.log(np.abs(np.asarray(residuals, dtype=float))), 1)
    return float(slope)


def energy_1d(p: WaveProblem, t: float, x_nodes, h: float = 1e-4) -> float:
    """
    Энергия int (u_t^2 + c0^2 u_x^2) dx на узлах x_nodes

    u_t - центральная разность по t, u_x - np.gradient по узлам.
    """
    if p.dim != 1:
        raise DomainError("energy_1d работает только при dim=1")
    x = np.asarray(x_nodes, dtype=float)
    u = dalembert_solve(p, t, x)
    u_t = (dalembert_solve(p, t + h, x) - dalembert_solve(p, t - h, x)) / (2.0 * h)
    u_x = np.gradient(u, x, edge_order=2)
    return float(np.sum((u_t ** 2 + p.c0 ** 2 * u_x ** 2) * trapezoid_weights(x)))
