#!/usr/bin/env python3
"""
Последовательные приближения для полулинейных уравнений

Параболический случай (прямая):  u_t - u_xx = F(x, u, u_x), u(0, x) = 0.
Эллиптический случай (шар в R^3): lap u = f(x, u), f = 0 вне B(0, b).
"""

import logging
from dataclasses import dataclass, field
from math import factorial
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy import ndimage
from scipy.interpolate import RegularGridInterpolator

from core.errors import DomainError, FixedPointError, HypothesisError, NonConvergenceError, UnsupportedError
from core.grids import SpaceGrid, TimeGrid
from core.quadrature import QuadratureSpec, gauss_hermite, gauss_legendre
from core.tables import SolutionTable
from solvers.second_order_pde.potential import potential_values

logger = logging.getLogger(__name__)

# C1 = pi^(-1/2) int |z| exp(-z^2) dz на прямой
KERNEL_GRADIENT_CONSTANT = 1.0 / np.sqrt(np.pi)
ELLIPTIC_QUADRATURE = QuadratureSpec('sphere', (12, 8, 16))
CHUNK = 256


@dataclass(frozen=True)
class ParabolicBounds:
    """
    Константы рабочей области: |F| <= C, липшицевость L, радиус delta
    """

    C: float
    L: float
    delta: float


@dataclass
class PicardReport:
    """
    Ход итераций

    Args:
        gaps: sup-расстояния между соседними приближениями
        bounds: Теоретическая оценка для каждого шага (если известна)
        ratio: Теоретический коэффициент сжатия (если известен)
        converged: Достигнута точность tol
    """

    gaps: List[float] = field(default_factory=list)
    bounds: List[float] = field(default_factory=list)
    ratio: Optional[float] = None
    converged: bool = False
    diagnostics: Dict[str, float] = field(default_factory=dict)

    @property
    def iterations(self) -> int:
        return len(self.gaps)

    @property
    def observed_ratios(self) -> np.ndarray:
        gaps = np.asarray(self.gaps)
        if len(gaps) < 2:
            return np.empty(0)
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.where(gaps[:-1] > 0, gaps[1:] / gaps[:-1], 0.0)


def _check_horizon(bounds: ParabolicBounds, a: float):
    if bounds.C * a > bounds.delta:
        raise DomainError(f"Горизонт слишком велик: a C = {bounds.C * a:.3g} > delta = {bounds.delta}")
    drift = 2.0 * np.sqrt(a) * bounds.C * KERNEL_GRADIENT_CONSTANT
    if drift > bounds.delta:
        raise DomainError(f"Горизонт слишком велик: 2 sqrt(a) C C1 = {drift:.3g} > delta = {bounds.delta}")


def parabolic_gap_bound(bounds: ParabolicBounds, a: float, k: int) -> float:
    """Оценка 2 delta C_a^k (a^k / k!)^(1/3), C_a = L (C1 sqrt(a) + a^(2/3))"""
    C_a = bounds.L * (KERNEL_GRADIENT_CONSTANT * np.sqrt(a) + a ** (2.0 / 3.0))
    return 2.0 * bounds.delta * C_a ** k * (a ** k / factorial(k)) ** (1.0 / 3.0)


def _is_growing(gaps: List[float], tol: float) -> bool:
    return len(gaps) >= 2 and gaps[-1] > tol and gaps[-1] > gaps[-2] * (1.0 + 1e-9)


class _HeatPotential:
    """
    Интегралы int_0^t int F(y) P(t - s, x, y) dy ds и их x-производные

    sigma = t - s = tau^2 снимает особенность 1/sqrt(sigma) у x-производной ядра;
    по tau - Гаусс-Лежандр на [0, sqrt(t)], по пространству - Гаусс-Эрмит.
    """

    def __init__(self, times: np.ndarray, x: np.ndarray, n_tau: int, n_z: int):
        self.times = times
        self.x = x
        z, wz = gauss_hermite(n_z)
        self.z, self.wz = z, wz
        s_unit, w_unit = gauss_legendre(0.0, 1.0, n_tau)
        root = np.sqrt(times)[:, None]
        self.tau = root * s_unit
        self.w_tau = root * w_unit
        # узлы (t_i, x_j, tau, z)
        self.s = times[:, None, None, None] - self.tau[:, None, :, None] ** 2
        y = x[None, :, None, None] + 2.0 * self.tau[:, None, :, None] * z
        self.y = np.clip(y, x[0], x[-1])
        self.y_raw = y

    def integrate(self, density: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """density формы (n_t, n_x, n_tau, n_z) -> (u, p) формы (n_t, n_x)"""
        space_u = density @ self.wz
        space_p = (density * self.z) @ self.wz
        tau = self.tau[:, None, :]
        w = self.w_tau[:, None, :]
        u = np.sum(2.0 * tau * space_u * w, axis=-1)
        p = np.sum(2.0 * space_p * w, axis=-1)
        return u, p


def nonlinear_parabolic_picard(F: Callable, t_grid: TimeGrid, x_grid, max_iter: int = 30,
                               tol: float = 1e-10, bounds: Optional[ParabolicBounds] = None,
                               n_tau: int = 16, n_z: int = 24):
    """
    u_{k+1} = int_0^t int F(y, u_k, p_k) P dy ds,  p_{k+1} - то же с d_x P

    P(sigma, x, y) = (4 pi sigma)^(-1/2) exp(-(y - x)^2 / (4 sigma)), u_0 = p_0 = 0.
    Вне сетки по x приближения продолжаются константой.

    Args:
        F: F(y, u, p), массивы одной формы
        t_grid: Сетка по времени с t0 = 0
        x_grid: SpaceGrid на прямой или возрастающий массив узлов
        max_iter: Максимум итераций K
        tol: Точность по sup-расстоянию
        bounds: (C, L, delta) - проверка горизонта и теоретические оценки

    Returns:
        Tuple[SolutionTable, SolutionTable, PicardReport]: u, p и ход итераций

    Raises:
        DomainError: Горизонт не удовлетворяет условиям
        NonConvergenceError: Расстояния между приближениями растут
    """
    if t_grid.t0 != 0:
        raise DomainError(f"Начальный момент должен быть 0, получено {t_grid.t0}")
    if isinstance(x_grid, SpaceGrid):
        if x_grid.dim != 1:
            raise UnsupportedError("Параболическая итерация реализована только на прямой")
        x = x_grid.axes[0]
    else:
        x = np.asarray(x_grid, dtype=float)
    times = t_grid.nodes
    a = float(times[-1])
    report = PicardReport()
    if bounds is not None:
        _check_horizon(bounds, a)
        report.ratio = bounds.L * (KERNEL_GRADIENT_CONSTANT * np.sqrt(a) + a ** (2.0 / 3.0))

    kernel = _HeatPotential(times, x, n_tau, n_z)
    u = np.zeros((len(times), len(x)))
    p = np.zeros_like(u)
    points = np.stack(np.broadcast_arrays(kernel.s, kernel.y), axis=-1)
    for k in range(1, max_iter + 1):
        u_at = RegularGridInterpolator((times, x), u)(points)
        p_at = RegularGridInterpolator((times, x), p)(points)
        density = np.broadcast_to(np.asarray(F(kernel.y_raw, u_at, p_at), dtype=float), u_at.shape)
        u_next, p_next = kernel.integrate(density)
        gap = float(max(np.max(np.abs(u_next - u)), np.max(np.abs(p_next - p))))
        u, p = u_next, p_next
        report.gaps.append(gap)
        if bounds is not None:
            report.bounds.append(parabolic_gap_bound(bounds, a, k))
        logger.debug(f"Параболическая итерация {k}: расстояние {gap:.3g}")
        if gap <= tol:
            report.converged = True
            break
        if _is_growing(report.gaps, tol):
            raise NonConvergenceError(f"Расстояния между приближениями растут на шаге {k}", last_gap=gap)

    logger.info(f"Параболические приближения: {report.iterations} итераций, расстояние {report.gaps[-1]:.3g}")
    u_table = SolutionTable((times, x), ('t', 'x'), u, "parabolic-picard")
    p_table = SolutionTable((times, x), ('t', 'x'), p, "parabolic-picard")
    return u_table, p_table, report


@dataclass(frozen=True)
class EllipticResult:
    """
    Args:
        table: u на кубической сетке, маска - узлы шара
        report: Ход итераций (ratio = rho = lambda K0)
        residual: max |lap u - f(x, u)| / max |f| по узлам, все соседи которых в шаре
    """

    table: SolutionTable
    report: PicardReport
    residual: float


def _lipschitz_in_u(f: Callable, points: np.ndarray, bound: float, samples: int = 9) -> float:
    """max |df/du| по точкам шара и |u| <= bound"""
    levels = np.linspace(-bound, bound, samples) if bound > 0 else np.zeros(1)
    u = np.broadcast_to(levels, points.shape[:-1] + levels.shape)
    y = np.broadcast_to(points[..., None, :], u.shape + (points.shape[-1],))
    step = 1e-6 * (1.0 + np.abs(u))
    slope = (np.asarray(f(y, u + step)) - np.asarray(f(y, u - step))) / (2.0 * step)
    return float(np.max(np.abs(slope)))


def _interpolate(values: np.ndarray, lower: float, spacing: float, y: np.ndarray) -> np.ndarray:
    coords = np.moveaxis((y - lower) / spacing, -1, 0)
    flat = coords.reshape(coords.shape[0], -1)
    out = ndimage.map_coordinates(values, flat, order=1, mode='nearest')
    return out.reshape(y.shape[:-1])


def _laplacian_residual(u: np.ndarray, rhs: np.ndarray, inside: np.ndarray, h: float) -> float:
    core = inside.copy()
    for axis in range(3):
        for shift in (1, -1):
            core &= np.roll(inside, shift, axis=axis)
    edge = np.zeros_like(core)
    for axis in range(3):
        index = [slice(None)] * 3
        index[axis] = 0
        edge[tuple(index)] = True
        index[axis] = -1
        edge[tuple(index)] = True
    core &= ~edge
    if not core.any():
        return 0.0
    lap = -6.0 * u
    for axis in range(3):
        lap = lap + np.roll(u, 1, axis=axis) + np.roll(u, -1, axis=axis)
    lap /= h * h
    scale = max(float(np.max(np.abs(rhs[inside]))), 1e-300)
    return float(np.max(np.abs(lap - rhs)[core])) / scale


def nonlinear_elliptic_picard(f: Callable, b: float, n: int = 3, grid_intervals: int = 12,
                              max_iter: int = 30, tol: float = 1e-10,
                              lipschitz: Optional[float] = None,
                              quad: QuadratureSpec = ELLIPTIC_QUADRATURE) -> EllipticResult:
    """
    u_{k+1}(x) = C int_B f(y, u_k(y)) |y - x|^(-1) dy,  C = -1 / (4 pi)

    Интеграл - ньютонов потенциал плотности f(y, u_k(y)) в шаре, u_k между
    узлами интерполируется линейно. Гипотеза сжатия: rho = lambda K0 < 1/2,
    K0 = 2 b^2, lambda - максимум |df/du| при |u| <= 2 K0 max |f(x, 0)|.

    Raises:
        UnsupportedError: n != 3
        HypothesisError: rho >= 1/2
        FixedPointError: Расстояния между приближениями растут
    """
    if n != 3:
        raise UnsupportedError(f"Эллиптическая итерация реализована только для n = 3, получено {n}")
    if not b > 0:
        raise DomainError(f"Радиус шара должен быть положительным, получено {b}")
    grid = SpaceGrid([-b] * 3, [b] * 3, [grid_intervals] * 3)
    nodes = grid.points()
    h = grid.spacing[0]
    inside = np.sum(nodes ** 2, axis=-1) <= b * b
    flat_nodes = nodes.reshape(-1, 3)

    K0 = 2.0 * b * b / (n - 2)
    C0 = float(np.max(np.abs(np.asarray(f(nodes[inside], np.zeros(int(inside.sum())))))))
    K1 = C0 * K0
    lam = _lipschitz_in_u(f, nodes[inside], 2.0 * K1) if lipschitz is None else float(lipschitz)
    rho = lam * K0
    if rho >= 0.5:
        raise HypothesisError(f"Условие сжатия нарушено: rho = lambda K0 = {rho:.3g} >= 1/2")
    report = PicardReport(ratio=rho, diagnostics={'K0': K0, 'K1': K1, 'lambda': lam})

    scale = -1.0 / (4.0 * np.pi)
    u = np.zeros(grid.shape)
    for k in range(1, max_iter + 1):
        def density(y, current=u):
            # f обнуляется вне шара
            values = np.asarray(f(y, _interpolate(current, -b, h, y)), dtype=float)
            return np.where(np.sum(y ** 2, axis=-1) <= b * b, values, 0.0)

        pieces = [potential_values(density, flat_nodes[i:i + CHUNK], quad, b)
                  for i in range(0, len(flat_nodes), CHUNK)]
        u_next = scale * np.concatenate(pieces).reshape(grid.shape)
        gap = float(np.max(np.abs(u_next - u)[inside]))
        u = u_next
        report.gaps.append(gap)
        report.bounds.append(2.0 * K1 * rho ** (k - 1))
        logger.debug(f"Эллиптическая итерация {k}: расстояние {gap:.3g}")
        if gap <= tol:
            report.converged = True
            break
        if _is_growing(report.gaps, tol):
            raise FixedPointError(f"Отображение не сжимает: расстояние выросло на шаге {k}", last_gap=gap)

    rhs = np.asarray(f(nodes, u), dtype=float)
    residual = _laplacian_residual(u, rhs, inside, h)
    logger.info(f"Эллиптические приближения: {report.iterations} итераций, rho = {rho:.3g}, "
                f"невязка {residual:.3g}")
    names = ('x1', 'x2', 'x3')
    table = SolutionTable(tuple(grid.axes), names, u, "elliptic-picard", mask=inside)
    return EllipticResult(table=table, report=report, residual=residual)
