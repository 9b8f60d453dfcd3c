#!/usr/bin/env python3
"""
Задача Коши для линейных и нелинейных ОДУ

Классический метод Рунге-Кутты четвёртого порядка, итерации Пикара,
фундаментальные матрицы, тождество Лиувилля, вариация постоянных,
матричная экспонента, экспоненциальная устойчивость и уравнения с
запаздыванием (метод шагов).
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import (DivergenceError, DomainError, IntegrityError, NonConvergenceError,
                         NumericError)
from core.fields import FieldSpec
from core.grids import TimeGrid, node_index
from core.quadrature import cumulative_integral
from core.tables import TrajectoryTable

logger = logging.getLogger(__name__)

# Порог отношения |f(y'')-f(y')|/|y''-y'|, после которого поле считается нелипшицевым
LIPSCHITZ_FLAG = 1e6


def rk4_step(rhs: Callable, t: float, y: np.ndarray, h: float) -> np.ndarray:
    """Один шаг классического метода Рунге-Кутты"""
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_nodes(rhs: Callable, nodes: np.ndarray, y0, start: int = 0) -> np.ndarray:
    """
    Интегрирование RK4 по узлам в обе стороны от узла start

    Args:
        rhs: Правая часть rhs(t, y), y произвольной формы
        nodes: Узлы (N,)
        y0: Состояние в узле start
        start: Индекс начального узла

    Returns:
        np.ndarray: Состояния формы (N,) + y0.shape

    Raises:
        DivergenceError: Получено нечисловое состояние
    """
    y0 = np.asarray(y0, dtype=float)
    states = np.empty((len(nodes),) + y0.shape)
    states[start] = y0
    for direction in (1, -1):
        stop = len(nodes) if direction > 0 else -1
        y = y0
        for i in range(start, stop - direction, direction):
            t, t_next = nodes[i], nodes[i + direction]
            y_next = rk4_step(rhs, t, y, t_next - t)
            if not np.all(np.isfinite(y_next)):
                logger.error(f"Траектория разошлась после узла t={t}")
                raise DivergenceError(f"Нечисловое состояние на шаге {t} -> {t_next}", last_time=float(t),
                                      last_state=np.array(y))
            states[i + direction] = y_next
            y = y_next
    return states


def lipschitz_ratio(f: FieldSpec, t: float, y) -> float:
    """
    Наибольшее отношение |f(y+d)-f(y)|/|d| на сжимающихся смещениях

    Args:
        f: Поле
        t: Момент времени
        y: Точка (d,) или пакет, берётся первая точка

    Returns:
        float: Максимальное отношение по смещениям 10^-2 ... 10^-12
    """
    point = np.asarray(y, dtype=float).reshape(-1, f.dim)[0]
    base = f(t, point)
    scale = 1.0 + float(np.linalg.norm(point))
    worst = 0.0
    for k in range(2, 13):
        delta = scale * 10.0 ** (-k)
        for j in range(f.dim):
            for sign in (1.0, -1.0):
                shifted = point.copy()
                shifted[j] += sign * delta
                ratio = float(np.linalg.norm(f(t, shifted) - base)) / delta
                worst = max(worst, ratio)
    return worst


def gronwall_bound(M: float, alpha: Callable, grid: TimeGrid) -> 'GronwallBound':
    """
    Оценка Гронуолла x -> M exp(int_a^x alpha)

    Args:
        M: Неотрицательная константа
        alpha: Неотрицательная функция на отрезке
        grid: Сетка, интеграл считается трапецией по её узлам

    Returns:
        GronwallBound: Вызываемая оценка
    """
    if M < 0:
        raise DomainError(f"Константа M должна быть неотрицательной, получено {M}")
    nodes = grid.nodes
    samples = np.broadcast_to(np.asarray(_sample_scalar(alpha, nodes), dtype=float), nodes.shape)
    if np.any(samples < 0) or not np.all(np.isfinite(samples)):
        raise DomainError("Функция alpha должна быть неотрицательной и конечной на сетке")
    integral = cumulative_integral(samples, nodes)
    return GronwallBound(nodes=nodes, values=M * np.exp(integral))


def _sample_scalar(func: Callable, nodes: np.ndarray) -> np.ndarray:
    try:
        values = np.asarray(func(nodes), dtype=float)
        if values.shape in ((), nodes.shape):
            return values
    except (TypeError, ValueError):
        pass
    return np.array([float(func(x)) for x in nodes])


@dataclass(frozen=True)
class GronwallBound:
    """Значения оценки в узлах и линейная интерполяция между ними"""

    nodes: np.ndarray
    values: np.ndarray

    def __call__(self, x):
        return np.interp(x, self.nodes, self.values)


@dataclass(frozen=True)
class LinearSystemSpec:
    """
    Линейная система dz/dx = A(x) z + b(x)

    Args:
        A: Функция x -> матрица (n, n) либо постоянная матрица
        b: Функция x -> вектор (n,), постоянный вектор или None
        dim: Размерность n
    """

    A: Any
    b: Any = None
    dim: Optional[int] = None

    def __post_init__(self):
        if self.dim is None:
            object.__setattr__(self, 'dim', int(np.atleast_2d(self.matrix(0.0)).shape[0]))

    def matrix(self, x: float) -> np.ndarray:
        value = self.A(x) if callable(self.A) else self.A
        return np.atleast_2d(np.asarray(value, dtype=float))

    def vector(self, x: float) -> np.ndarray:
        if self.b is None:
            return np.zeros(self.dim)
        value = self.b(x) if callable(self.b) else self.b
        return np.broadcast_to(np.asarray(value, dtype=float), (self.dim,))

    def sample(self, nodes: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Матрицы и свободные члены в узлах"""
        A = np.stack([self.matrix(x) for x in nodes])
        b = np.stack([self.vector(x) for x in nodes])
        if A.shape[1:] != (self.dim, self.dim) or not np.all(np.isfinite(A)) or not np.all(np.isfinite(b)):
            raise DomainError("A(x), b(x) должны быть конечны и согласованы по размерности на сетке")
        return A, b

    def as_field(self) -> FieldSpec:
        """Правая часть в виде FieldSpec"""

        def func(t, y):
            t_arr = np.asarray(t, dtype=float)
            if t_arr.ndim == 0:
                return np.asarray(y) @ self.matrix(float(t_arr)).T + self.vector(float(t_arr))
            A, b = self.sample(t_arr.ravel())
            A = A.reshape(t_arr.shape + (self.dim, self.dim))
            b = b.reshape(t_arr.shape + (self.dim,))
            return np.einsum('...ij,...j->...i', A, y) + b

        return FieldSpec(func, self.dim, lambda t, y: self.matrix(float(t)), name="linear-system")


def solve_ivp(f: FieldSpec, x0: float, y0, grid: TimeGrid) -> TrajectoryTable:
    """
    Задача Коши методом Рунге-Кутты четвёртого порядка с постоянным шагом

    Args:
        f: Правая часть
        x0: Начальный момент, узел сетки
        y0: Данные Коши (d,) или пакет (..., d)
        grid: Сетка по времени

    Returns:
        TrajectoryTable: Траектория; флаг non_unique, если поле не липшицево в y0
    """
    nodes = grid.nodes
    start = node_index(nodes, x0)
    y0 = np.asarray(y0, dtype=float)
    if y0.ndim == 0:
        y0 = y0.reshape(1)
    ratio = lipschitz_ratio(f, x0, y0)
    non_unique = ratio > LIPSCHITZ_FLAG
    if non_unique:
        logger.warning(f"Поле {f.name} не липшицево около начальной точки (отношение {ratio:.3g}), "
                       f"решение задачи Коши может быть не единственным")
    states = integrate_nodes(f, nodes, y0, start)
    return TrajectoryTable(nodes, states, "rk4",
                           {'steps': grid.n, 'lipschitz_ratio': ratio, 'non_unique': bool(non_unique)})


def picard_solve(spec: Union[LinearSystemSpec, FieldSpec], x0: float, y0, grid: TimeGrid,
                 tol: float = 1e-10, max_iter: int = 100) -> TrajectoryTable:
    """
    Последовательные приближения Пикара для интегрального уравнения
    z(x) = z0 + int_{x0}^x f(t, z(t)) dt

    Args:
        spec: Линейная система или поле
        x0: Начальный момент, узел сетки
        y0: Данные Коши
        grid: Сетка квадратуры
        tol: Порог sup-нормы разности соседних приближений
        max_iter: Предельное число итераций

    Returns:
        TrajectoryTable: Решение с числом итераций в diagnostics

    Raises:
        NonConvergenceError: За max_iter итераций не достигнут tol
    """
    if tol <= 0 or max_iter < 1:
        raise DomainError(f"Требуется tol > 0 и max_iter >= 1, получено tol={tol}, max_iter={max_iter}")
    nodes = grid.nodes
    start = node_index(nodes, x0)
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))

    if isinstance(spec, LinearSystemSpec):
        A, b = spec.sample(nodes)

        def integrand(z):
            return np.einsum('nij,nj->ni', A, z) + b
    else:
        def integrand(z):
            return spec(nodes, z)

    z = np.broadcast_to(y0, (len(nodes),) + y0.shape).copy()
    gaps: List[float] = []
    for iteration in range(1, max_iter + 1):
        z_next = y0 + cumulative_integral(integrand(z), nodes, axis=0, start=start)
        if not np.all(np.isfinite(z_next)):
            raise DivergenceError(f"Итерация Пикара {iteration} дала нечисловые значения")
        gap = float(np.max(np.abs(z_next - z)))
        gaps.append(gap)
        z = z_next
        if gap < tol:
            logger.info(f"Итерации Пикара сошлись за {iteration} шагов (зазор {gap:.3g})")
            return TrajectoryTable(nodes, z, "picard", {'iterations': iteration, 'gaps': gaps})
    logger.error(f"Итерации Пикара не сошлись за {max_iter} шагов, последний зазор {gaps[-1]:.3g}")
    raise NonConvergenceError(f"Итерации Пикара не сошлись за {max_iter} шагов", last_gap=gaps[-1])


@dataclass(frozen=True)
class FundamentalMatrixTable:
    """
    Фундаментальная матрица C(x; x0) и обратная D(x; x0) в узлах

    D получена из сопряжённой системы dD/dx = -D A(x), D(x0) = I.
    """

    x0: float
    nodes: np.ndarray
    matrices: np.ndarray
    determinants: np.ndarray
    inverse: np.ndarray
    start: int

    @property
    def identity_residual(self) -> float:
        """max |D C - I| по узлам"""
        eye = np.eye(self.matrices.shape[-1])
        return float(np.max(np.abs(self.inverse @ self.matrices - eye)))


def _matrix_function(A) -> Callable[[float], np.ndarray]:
    if isinstance(A, LinearSystemSpec):
        return A.matrix
    if callable(A):
        return lambda x: np.atleast_2d(np.asarray(A(x), dtype=float))
    constant = np.atleast_2d(np.asarray(A, dtype=float))
    return lambda x: constant


def fundamental_matrix(A, x0: float, grid: TimeGrid, det_tol: float = 1e-12) -> FundamentalMatrixTable:
    """
    Фундаментальная матрица системы dz/dx = A(x) z

    Столбцы - траектории RK4 из канонического базиса; одновременно
    интегрируется сопряжённая система для D = C^{-1}.

    Raises:
        IntegrityError: |det C| <= det_tol в каком-либо узле
    """
    matrix = _matrix_function(A)
    nodes = grid.nodes
    start = node_index(nodes, x0)
    n = matrix(x0).shape[0]

    def rhs(t, state):
        At = matrix(t)
        return np.stack([At @ state[0], -state[1] @ At])

    initial = np.stack([np.eye(n), np.eye(n)])
    states = integrate_nodes(rhs, nodes, initial, start)
    C, D = states[:, 0], states[:, 1]
    determinants = np.linalg.det(C)
    if np.any(np.abs(determinants) <= det_tol):
        index = int(np.argmin(np.abs(determinants)))
        raise IntegrityError(f"Фундаментальная матрица вырождена в узле x={nodes[index]}")
    return FundamentalMatrixTable(x0=float(x0), nodes=nodes, matrices=C, determinants=determinants,
                                  inverse=D, start=start)


@dataclass(frozen=True)
class LiouvilleReport:
    """Отчёт о проверке тождества Лиувилля"""

    residual: float
    relative_residual: float
    passed: bool


def liouville_check(A, table: FundamentalMatrixTable, tol: float = 1e-6) -> LiouvilleReport:
    """
    Сравнение det C(x; x0) с exp int_{x0}^x Tr A

    Returns:
        LiouvilleReport: Абсолютная и относительная невязки по узлам
    """
    matrix = _matrix_function(A)
    traces = np.array([np.trace(matrix(x)) for x in table.nodes])
    expected = np.exp(cumulative_integral(traces, table.nodes, start=table.start))
    diff = np.abs(table.determinants - expected)
    residual = float(np.max(diff))
    relative = float(np.max(diff / np.abs(expected)))
    logger.info(f"Проверка Лиувилля: невязка {residual:.3g}, относительная {relative:.3g}")
    return LiouvilleReport(residual=residual, relative_residual=relative, passed=relative <= tol)


def constant_variation_solution(spec: LinearSystemSpec, x0: float, z0, grid: TimeGrid) -> TrajectoryTable:
    """
    Формула вариации постоянных z(x) = C(x)[z0 + int C^{-1}(t) b(t) dt]
    """
    table = fundamental_matrix(spec, x0, grid)
    _, b = spec.sample(table.nodes)
    integrand = np.einsum('nij,nj->ni', table.inverse, b)
    accumulated = cumulative_integral(integrand, table.nodes, axis=0, start=table.start)
    z0 = np.atleast_1d(np.asarray(z0, dtype=float))
    states = np.einsum('nij,nj->ni', table.matrices, z0 + accumulated)
    return TrajectoryTable(table.nodes, states, "constant-variation",
                           {'identity_residual': table.identity_residual})


def matrix_exp(A, t: float = 1.0, ntaylor: int = 20, threshold: float = 0.5) -> np.ndarray:
    """
    Матричная экспонента exp(tA)

    Масштабирование с возведением в квадрат поверх усечённого ряда Тейлора.

    Args:
        A: Квадратная матрица
        t: Множитель
        ntaylor: Число членов ряда
        threshold: Норма, до которой матрица масштабируется перед рядом

    Returns:
        np.ndarray: exp(tA)
    """
    M = np.atleast_2d(np.asarray(A, dtype=float)) * t
    n = M.shape[0]
    norm = float(np.linalg.norm(M, ord=1))
    squarings = int(math.ceil(math.log2(norm / threshold))) if norm > threshold else 0
    X = M / (2.0 ** squarings)
    result = np.eye(n)
    term = np.eye(n)
    for k in range(1, ntaylor + 1):
        term = term @ X / k
        result = result + term
    for _ in range(squarings):
        result = result @ result
    return result


@dataclass(frozen=True)
class StabilityReport:
    """
    Отчёт об экспоненциальной устойчивости z' = A z

    spectral_bound = 2w = max sigma(A + A^T); verdict = (w < 0).
    decay_rate - наибольший наклон log|z(t)| по выборке траекторий.
    """

    spectral_bound: float
    w: float
    decay_rate: float
    verdict: bool
    hurwitz: bool
    note: str
    witness_norms: np.ndarray
    bound_holds: bool


def _log_slope(times: np.ndarray, norms: np.ndarray) -> float:
    keep = norms > 0
    if np.count_nonzero(keep) < 2:
        return float('-inf')
    return float(np.polyfit(times[keep], np.log(norms[keep]), 1)[0])


def exponential_stability_check(A, grid: TimeGrid, samples: Sequence, tol: float = 1e-6) -> StabilityReport:
    """
    Проверка |z(t)| <= |z0| exp(w t) и знака w = max sigma(A + A^T) / 2

    Args:
        A: Постоянная вещественная матрица
        grid: Сетка интегрирования
        samples: Начальные векторы z0
        tol: Относительный допуск оценки

    Raises:
        NumericError: Сбой вычисления собственных значений
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    try:
        sym_eigs = np.linalg.eigvalsh(A + A.T)
        eigs = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as e:
        raise NumericError(f"Не удалось вычислить спектр: {e}") from e
    spectral_bound = float(np.max(sym_eigs))
    w = 0.5 * spectral_bound
    verdict = w < 0
    hurwitz = bool(np.max(eigs.real) < 0)
    note = ""
    if hurwitz and not verdict:
        note = "Hurwitz-only: спектр A в левой полуплоскости, но A + A^T не отрицательно определена"
        logger.warning(note)

    z0 = np.atleast_2d(np.asarray(samples, dtype=float))
    trajectory = solve_ivp(FieldSpec.linear(A), grid.t0, z0, grid)
    elapsed = trajectory.times - grid.t0
    norms = np.linalg.norm(trajectory.states, axis=-1)
    bound = np.linalg.norm(z0, axis=-1)[None, :] * np.exp(w * elapsed)[:, None] * (1.0 + tol)
    bound_holds = bool(np.all(norms <= bound + 1e-300))
    decay = max(_log_slope(elapsed, norms[:, j]) for j in range(norms.shape[1]))
    return StabilityReport(spectral_bound=spectral_bound, w=w, decay_rate=decay, verdict=bool(verdict),
                           hurwitz=hurwitz, note=note, witness_norms=norms, bound_holds=bound_holds)


def lyapunov_exponent_bound(A_family: Sequence) -> float:
    """
    Порог ||B|| = max_i ||A_i + A_i^T|| (спектральная норма) по конечному семейству

    Raises:
        DomainError: Пустое семейство
    """
    family = list(A_family)
    if not family:
        raise DomainError("Семейство матриц пусто")
    return max(float(np.linalg.norm(np.atleast_2d(M) + np.atleast_2d(M).T, ord=2)) for M in family)


@dataclass(frozen=True)
class LyapunovReport:
    """Результат проверки показателя Ляпунова gamma"""

    gamma: float
    threshold: float
    accepted: bool
    weighted_norms: np.ndarray
    fitted_exponent: float
    decays: bool


def lyapunov_exponent_check(A, gamma: float, z0, grid: TimeGrid) -> LyapunovReport:
    """
    Затухание e^{gamma t}|z(t)| для z' = A(t) z

    Семейство матриц - значения A в узлах сетки.
    """
    matrix = _matrix_function(A)
    nodes = grid.nodes
    threshold = lyapunov_exponent_bound([matrix(x) for x in nodes])
    accepted = gamma < 0 and abs(gamma) > threshold
    trajectory = solve_ivp(LinearSystemSpec(matrix).as_field(), grid.t0, z0, grid)
    elapsed = nodes - grid.t0
    weighted = np.exp(gamma * elapsed) * np.linalg.norm(trajectory.states, axis=-1)
    fitted = _log_slope(elapsed, weighted)
    decays = bool(weighted[-1] < weighted[0] and fitted < 0)
    logger.info(f"Показатель gamma={gamma}: порог {threshold:.3g}, принят={accepted}, затухание={decays}")
    return LyapunovReport(gamma=gamma, threshold=threshold, accepted=bool(accepted), weighted_norms=weighted,
                          fitted_exponent=fitted, decays=decays)


def _history_function(history, sigma: float) -> Callable[[float], np.ndarray]:
    if isinstance(history, tuple):
        times = np.asarray(history[0], dtype=float)
        values = np.asarray(history[1], dtype=float).reshape(len(times), -1)
        if times[0] > -sigma + 1e-12 or times[-1] < -1e-12:
            raise DomainError(f"Предыстория задана на [{times[0]}, {times[-1]}] и не покрывает [{-sigma}, 0]")
        return lambda s: np.array([np.interp(s, times, values[:, j]) for j in range(values.shape[1])])

    def evaluate(s):
        return np.atleast_1d(np.asarray(history(s), dtype=float))

    for s in np.linspace(-sigma, 0.0, 33):
        try:
            value = evaluate(s)
        except Exception as e:
            raise DomainError(f"Предыстория не определена в точке {s}: {e}") from e
        if not np.all(np.isfinite(value)):
            raise DomainError(f"Предыстория не конечна в точке {s}")
    return evaluate


def solve_delay_ode(f: Callable, sigma: float, history, grid: TimeGrid) -> TrajectoryTable:
    """
    Уравнение с запаздыванием y'(t) = f(t, y(t), y(t - sigma)) методом шагов

    Внутренняя сетка содержит все кратные sigma и узлы grid, поэтому шаги
    не пересекают кратные sigma. Запаздывающий аргумент берётся линейной
    интерполяцией по уже вычисленным узлам либо из предыстории.

    Args:
        f: Функция f(t, y, y_delayed)
        sigma: Запаздывание > 0
        history: Функция на [-sigma, 0] или пара (узлы, значения)
        grid: Сетка, начинающаяся в 0
    """
    if sigma <= 0:
        raise DomainError(f"Запаздывание должно быть положительным, получено {sigma}")
    if abs(grid.t0) > 1e-12:
        raise DomainError(f"Сетка должна начинаться в 0, получено {grid.t0}")
    past = _history_function(history, sigma)

    per_segment = int(math.ceil(sigma / grid.h - 1e-9))
    h_internal = sigma / per_segment
    aligned = h_internal * np.arange(int(math.floor(grid.t1 / h_internal + 1e-9)) + 1)
    merged = np.union1d(aligned, grid.nodes)
    keep = np.concatenate([[True], np.diff(merged) > 1e-12 * max(1.0, grid.t1)])
    nodes = merged[keep]
    nodes = nodes[nodes <= grid.t1 + 1e-12]

    y0 = past(0.0)
    states = np.empty((len(nodes), y0.shape[0]))
    states[0] = y0

    def delayed(t: float, filled: int) -> np.ndarray:
        s = t - sigma
        if s <= 0.0:
            return past(max(s, -sigma))
        known_t, known_y = nodes[:filled + 1], states[:filled + 1]
        return np.array([np.interp(s, known_t, known_y[:, j]) for j in range(known_y.shape[1])])

    for i in range(len(nodes) - 1):
        t, h = nodes[i], nodes[i + 1] - nodes[i]
        y = states[i]
        k1 = np.asarray(f(t, y, delayed(t, i)), dtype=float)
        mid = delayed(t + 0.5 * h, i)
        k2 = np.asarray(f(t + 0.5 * h, y + 0.5 * h * k1, mid), dtype=float)
        k3 = np.asarray(f(t + 0.5 * h, y + 0.5 * h * k2, mid), dtype=float)
        k4 = np.asarray(f(t + h, y + h * k3, delayed(t + h, i)), dtype=float)
        y_next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y_next)):
            raise DivergenceError(f"Решение с запаздыванием разошлось после t={t}", last_time=float(t),
                                  last_state=np.array(y))
        states[i + 1] = y_next

    picks = [int(np.argmin(np.abs(nodes - x))) for x in grid.nodes]
    segments = int(math.ceil(grid.t1 / sigma - 1e-9))
    logger.info(f"Метод шагов: {segments} отрезков запаздывания, {len(nodes) - 1} внутренних шагов")
    return TrajectoryTable(grid.nodes, states[picks], "method-of-steps",
                           {'internal_steps': len(nodes) - 1, 'segments': segments})
