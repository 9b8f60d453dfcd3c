#!/usr/bin/env python3
"""
Уравнения Стратоновича и их аппроксимация по Вонгу-Закаи

dx = f(t, x) dt + sum_j g_j(t, x) o dw_j  приближается случайными ОДУ
dx/dt = f(t, x) + sum_j g_j(t, x) dv_eps_j / dt  со сглаженной траекторией v_eps.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import DivergenceError, DomainError
from core.fields import FieldSpec, numerical_gradient
from core.grids import TimeGrid
from core.tables import TrajectoryTable
from solvers.ode_core import rk4_step
from solvers.stochastic.wiener import SmoothedPath, WienerPath, sample_wiener, smooth_path_ou

logger = logging.getLogger(__name__)

SCHEMES = ('euler', 'heun')
SUBSTEP_FRACTION = 0.1
Z95 = 1.959963984540054


@dataclass(frozen=True)
class SDEProblem:
    """
    Уравнение Стратоновича

    Args:
        f: Снос
        g: Диффузии g_1..g_m
        x0: Начальное состояние (d,)
        T: Горизонт
        exact: Точное решение exact(t, x0, w) при известной траектории, если есть
    """

    f: FieldSpec
    g: Tuple[FieldSpec, ...]
    x0: np.ndarray
    T: float
    exact: Optional[Callable] = None
    name: str = "sde"

    def __post_init__(self):
        object.__setattr__(self, 'g', tuple(self.g))
        object.__setattr__(self, 'x0', np.atleast_1d(np.asarray(self.x0, dtype=float)))
        d = self.x0.shape[-1]
        if self.f.dim != d or any(g.dim != d for g in self.g):
            raise DomainError(f"Размерности сноса и диффузий не совпадают с размерностью состояния {d}")
        if not self.T > 0:
            raise DomainError(f"Горизонт должен быть положительным, получено {self.T}")

    @property
    def m(self) -> int:
        return len(self.g)

    def correction(self, t, x) -> np.ndarray:
        """Поправка Стратоновича 1/2 sum_j (dg_j) g_j"""
        total = np.zeros_like(np.asarray(x, dtype=float))
        for g in self.g:
            total = total + 0.5 * np.einsum('...ij,...j->...i', g.jac(t, x), g(t, x))
        return total

    def diffusion(self, t, x, dw) -> np.ndarray:
        total = np.zeros_like(np.asarray(x, dtype=float))
        for j, g in enumerate(self.g):
            total = total + g(t, x) * dw[..., j:j + 1]
        return total


def _check_path(p: SDEProblem, path: WienerPath):
    if p.m and path.m != p.m:
        raise DomainError(f"Размерность траектории {path.m} не совпадает с числом диффузий {p.m}")


def _initial(p: SDEProblem, path: WienerPath) -> np.ndarray:
    return np.broadcast_to(p.x0, path.batch_shape + p.x0.shape).copy()


def _stop(t: float, x: np.ndarray, label: str):
    logger.error(f"{label}: траектория разошлась после t={t}")
    raise DivergenceError(f"{label}: нечисловое состояние после t={t}", last_time=float(t), last_state=np.array(x))


def integrate_stratonovich(p: SDEProblem, path: WienerPath, scheme: str = 'euler') -> TrajectoryTable:
    """
    euler: Эйлер-Маруяма для формы Ито со сносом f + 1/2 sum (dg_j) g_j;
    heun: стохастический метод Хойна для формы Стратоновича

    Raises:
        DivergenceError: Нечисловое состояние
    """
    if scheme not in SCHEMES:
        raise DomainError(f"Неизвестная схема '{scheme}', допустимые: {', '.join(SCHEMES)}")
    _check_path(p, path)
    times = path.times
    x = _initial(p, path)
    states = np.empty((len(times),) + x.shape)
    states[0] = x
    for n in range(len(times) - 1):
        t, h, dw = times[n], times[n + 1] - times[n], path.increments[n]
        if scheme == 'euler':
            x = x + (p.f(t, x) + p.correction(t, x)) * h + p.diffusion(t, x, dw)
        else:
            drift, noise = p.f(t, x), p.diffusion(t, x, dw)
            guess = x + drift * h + noise
            x = x + 0.5 * (drift + p.f(times[n + 1], guess)) * h \
                + 0.5 * (noise + p.diffusion(times[n + 1], guess, dw))
        if not np.all(np.isfinite(x)):
            _stop(t, states[n], p.name)
        states[n + 1] = x
    return TrajectoryTable(times, states, f"stratonovich-{scheme}", {'seed': path.seed})


def integrate_approx_ode(p: SDEProblem, smoothed: SmoothedPath) -> TrajectoryTable:
    """
    RK4 для dx/dt = f + sum_j g_j dv_j/dt с шагом не больше eps / 10

    Raises:
        DivergenceError: Нечисловое состояние
    """
    path = smoothed.source
    _check_path(p, path)
    times = path.times
    x = _initial(p, path)
    states = np.empty((len(times),) + x.shape)
    states[0] = x

    def rhs(t, y):
        return p.f(t, y) + p.diffusion(t, y, smoothed.velocity(t))

    limit = SUBSTEP_FRACTION * smoothed.eps
    for n in range(len(times) - 1):
        span = times[n + 1] - times[n]
        count = max(1, int(np.ceil(span / limit - 1e-9)))
        h = span / count
        for k in range(count):
            x = rk4_step(rhs, times[n] + k * h, x, h)
        if not np.all(np.isfinite(x)):
            _stop(times[n], states[n], p.name)
        states[n + 1] = x
    return TrajectoryTable(times, states, "wong-zakai-rk4", {'eps': smoothed.eps, 'seed': path.seed})


@dataclass
class ConvergenceStudy:
    """
    Парная оценка E |x_eps(T) - x_0(T)|^2

    Args:
        rows: (epsilon, mse, ci_low, ci_high, n_paths, seed)
        slope: Наклон log mse по log eps (nan, если шум отсутствует)
        constant: Измеренная константа max mse / eps
        passed: slope >= 0.8 или шум отсутствует
    """

    rows: List[Tuple[float, float, float, float, int, int]] = field(default_factory=list)
    slope: float = float('nan')
    constant: float = 0.0
    passed: bool = True

    HEADER = ('epsilon', 'mse', 'ci_low', 'ci_high', 'n_paths', 'seed')


def _mean_ci(samples: np.ndarray) -> Tuple[float, float, float]:
    mean = float(np.mean(samples))
    half = Z95 * float(np.std(samples, ddof=1)) / np.sqrt(len(samples)) if len(samples) > 1 else 0.0
    return mean, mean - half, mean + half


def _reference(p: SDEProblem, path: WienerPath) -> np.ndarray:
    if p.exact is not None:
        value = p.exact(path.times[-1], p.x0, path.values[-1])
        return np.broadcast_to(np.asarray(value, dtype=float), path.batch_shape + p.x0.shape)
    return integrate_stratonovich(p, path, 'heun').final


def wz_convergence_study(p: SDEProblem, eps_list: Sequence[float], n_paths: int, seed: int,
                         n_steps: Optional[int] = None, min_slope: float = 0.8) -> ConvergenceStudy:
    """
    Одна и та же винеровская траектория ведёт оба интегратора

    Опорное решение - exact, если задано, иначе метод Хойна на той же сетке.
    По умолчанию шаг сетки не больше min(eps) / 8.
    """
    eps = np.asarray(eps_list, dtype=float)
    if eps.size == 0 or np.any(eps <= 0):
        raise DomainError("Список eps должен быть непустым и положительным")
    if np.any(np.diff(eps) >= 0):
        raise DomainError("Список eps должен убывать")
    if n_paths < 2:
        raise DomainError(f"Для доверительного интервала нужно не менее двух траекторий, получено {n_paths}")
    steps = n_steps or int(np.ceil(8.0 * p.T / eps.min()))
    path = sample_wiener(TimeGrid(0.0, p.T, steps), max(p.m, 1), seed, n_paths)
    reference = _reference(p, path)

    study = ConvergenceStudy()
    for e in eps:
        approx = integrate_approx_ode(p, smooth_path_ou(path, e)).final
        errors = np.sum((approx - reference) ** 2, axis=-1)
        mean, low, high = _mean_ci(errors)
        study.rows.append((float(e), mean, low, high, int(n_paths), int(seed)))
        logger.info(f"Вонг-Закаи: eps={e:.4g}, E|x_eps - x_0|^2 = {mean:.4g}")

    mse = np.array([row[1] for row in study.rows])
    study.constant = float(np.max(mse / eps))
    if p.m == 0 or np.all(mse < 1e-20):
        logger.info("Шум отсутствует, наклон не проверяется")
        return study
    if len(eps) > 1:
        study.slope = float(np.polyfit(np.log(eps), np.log(np.maximum(mse, 1e-300)), 1)[0])
        study.passed = study.slope >= min_slope
    if not study.passed:
        logger.warning(f"Наклон сходимости {study.slope:.3f} меньше {min_slope}")
    return study


@dataclass(frozen=True)
class ItoReport:
    """
    Args:
        lhs: phi(T, x(T)) по траекториям
        rhs: Правая часть формулы замены переменных
        gaps: |lhs - rhs| / (1 + |lhs|)
        passed: max gap <= tol
    """

    lhs: np.ndarray
    rhs: np.ndarray
    gaps: np.ndarray
    passed: bool

    @property
    def max_gap(self) -> float:
        return float(np.max(self.gaps))


def ito_formula_check(phi: Callable, p: SDEProblem, path: WienerPath, tol: float,
                      phi_t: Optional[Callable] = None, phi_x: Optional[Callable] = None,
                      scheme: str = 'heun') -> ItoReport:
    """
    phi(T, x(T)) = phi(0, x0) + int [d_s phi + <d_x phi, f>] ds + sum_j int <d_x phi, g_j> o dw_j

    Оба интеграла берутся по среднему значений на концах шага, что для
    o-интеграла и есть правило Стратоновича.

    Args:
        phi: phi(t, x), x формы (..., d)
        phi_t, phi_x: Производные (по умолчанию центральные разности)
    """
    trajectory = integrate_stratonovich(p, path, scheme)
    times, states = trajectory.times, trajectory.states

    def d_t(t, x):
        if phi_t is not None:
            return np.asarray(phi_t(t, x), dtype=float)
        h = 1e-5 * (1.0 + abs(t))
        return (np.asarray(phi(t + h, x)) - np.asarray(phi(t - h, x))) / (2.0 * h)

    def d_x(t, x):
        if phi_x is not None:
            return np.broadcast_to(np.asarray(phi_x(t, x), dtype=float), np.shape(x))
        return numerical_gradient(lambda y: phi(t, y), x)

    def integrands(n):
        t, x = times[n], states[n]
        grad = d_x(t, x)
        ds = d_t(t, x) + np.sum(grad * p.f(t, x), axis=-1)
        dw = np.stack([np.sum(grad * g(t, x), axis=-1) for g in p.g], axis=-1) if p.g else None
        return ds, dw

    total = np.asarray(phi(times[0], states[0]), dtype=float)
    current = integrands(0)
    for n in range(len(times) - 1):
        following = integrands(n + 1)
        h = times[n + 1] - times[n]
        total = total + 0.5 * (current[0] + following[0]) * h
        if p.g:
            total = total + np.sum(0.5 * (current[1] + following[1]) * path.increments[n], axis=-1)
        current = following
    lhs = np.asarray(phi(times[-1], states[-1]), dtype=float)
    gaps = np.abs(lhs - total) / (1.0 + np.abs(lhs))
    passed = bool(np.max(gaps) <= tol)
    logger.info(f"Формула замены переменных: max относительный разрыв {float(np.max(gaps)):.3g}")
    return ItoReport(lhs=lhs, rhs=total, gaps=gaps, passed=passed)

