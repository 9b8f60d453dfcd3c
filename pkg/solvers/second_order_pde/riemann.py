#!/usr/bin/env python3
"""
Метод Римана для гиперболического уравнения

    L u = u_xy + a u_x + b u_y + c u = F

Функция Римана nu(x, y; x0, y0) решает сопряжённое уравнение
M nu = nu_xy - (a nu)_x - (b nu)_y + c nu = 0 с данными на характеристиках
nu(x0, y) = exp int_{y0}^y a(x0, s) ds, nu(x, y0) = exp int_{x0}^x b(s, y0) ds
и строится итерациями системы Вольтерра для (nu, nu_x, nu_y).
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.interpolate import RectBivariateSpline
from scipy.optimize import brentq

from core.errors import DomainError, FixedPointError
from core.fields import central_difference_jacobian
from core.quadrature import cumulative_integral, gauss_legendre

logger = logging.getLogger(__name__)

KINDS = ('cauchy', 'goursat')
CORNER_TOL = 1e-8
KERNEL_NODES = (64, 64)


def _zero(x, y):
    return np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)


def _derivative(func: Callable, x) -> np.ndarray:
    """Производная скалярной функции одной переменной по четырёхточечной разности"""
    x = np.asarray(x, dtype=float)
    return central_difference_jacobian(lambda z: func(z[..., 0]), x[..., None])[..., 0]


def _values(func: Callable, x, y) -> np.ndarray:
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return np.broadcast_to(np.asarray(func(x, y), dtype=float), x.shape)


@dataclass(frozen=True)
class RiemannProblem:
    """
    Задача Коши на кривой или задача Гурса для оператора L

    Args:
        target: Точка (x0, y0), в которой ищется u
        a, b, c: Коэффициенты a(x, y), b(x, y), c(x, y) (None - ноль)
        F: Правая часть F(x, y)
        kind: cauchy | goursat
        a_x, b_y: Производные коэффициентов, иначе разности
        mu, dmu: Кривая данных y = mu(x), mu' < 0
        phi0, phi1: u и u_y на кривой как функции x
        corner: Угол (x1, y1) прямоугольника Гурса
        goursat_y: u(x1, y) на вертикальной характеристике
        goursat_x: u(x, y1) на горизонтальной характеристике
    """

    target: Tuple[float, float]
    a: Optional[Callable] = None
    b: Optional[Callable] = None
    c: Optional[Callable] = None
    F: Optional[Callable] = None
    kind: str = 'goursat'
    a_x: Optional[Callable] = None
    b_y: Optional[Callable] = None
    mu: Optional[Callable] = None
    dmu: Optional[Callable] = None
    phi0: Optional[Callable] = None
    phi1: Optional[Callable] = None
    corner: Optional[Tuple[float, float]] = None
    goursat_y: Optional[Callable] = None
    goursat_x: Optional[Callable] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"Неизвестный тип задачи '{self.kind}', допустимые: {', '.join(KINDS)}")
        object.__setattr__(self, 'target', tuple(float(v) for v in self.target))
        if self.kind == 'cauchy' and (self.mu is None or self.phi0 is None or self.phi1 is None):
            raise DomainError("Для задачи Коши нужны mu, phi0 и phi1")
        if self.kind == 'goursat' and (self.corner is None or self.goursat_x is None or self.goursat_y is None):
            raise DomainError("Для задачи Гурса нужны corner, goursat_x и goursat_y")

    def coefficient(self, name: str) -> Callable:
        return getattr(self, name) or _zero

    def source(self) -> Callable:
        return self.F or _zero

    def coefficient_x(self) -> Callable:
        """a_x(x, y)"""
        if self.a_x is not None:
            return self.a_x
        a = self.coefficient('a')
        return lambda x, y: _derivative(lambda s: _values(a, s, y), x)

    def coefficient_y(self) -> Callable:
        """b_y(x, y)"""
        if self.b_y is not None:
            return self.b_y
        b = self.coefficient('b')
        return lambda x, y: _derivative(lambda s: _values(b, x, s), y)

    def adjoint(self) -> 'RiemannProblem':
        """Сопряжённый оператор: a -> -a, b -> -b, c -> c - a_x - b_y"""
        a, b, c = self.coefficient('a'), self.coefficient('b'), self.coefficient('c')
        a_x, b_y = self.coefficient_x(), self.coefficient_y()
        return RiemannProblem(
            target=self.target, kind=self.kind, F=self.F,
            a=lambda x, y: -_values(a, x, y),
            b=lambda x, y: -_values(b, x, y),
            c=lambda x, y: _values(c, x, y) - _values(a_x, x, y) - _values(b_y, x, y),
            a_x=lambda x, y: -_values(a_x, x, y),
            b_y=lambda x, y: -_values(b_y, x, y),
            mu=self.mu, dmu=self.dmu, phi0=self.phi0, phi1=self.phi1,
            corner=self.corner, goursat_y=self.goursat_y, goursat_x=self.goursat_x,
        )


@dataclass(frozen=True)
class RiemannKernel:
    """
    Функция Римана на сетке прямоугольника от источника (x0, y0) до угла

    Args:
        xs, ys: Равномерные узлы, xs[0] = x0, ys[0] = y0 (могут убывать)
        values: nu в узлах (len(xs), len(ys))
        iterations: Число итераций Пикара
        gaps: Невязки по итерациям
    """

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray
    iterations: int
    gaps: List[float] = field(default_factory=list)

    @property
    def source(self) -> Tuple[float, float]:
        return float(self.xs[0]), float(self.ys[0])

    def __call__(self, x, y) -> np.ndarray:
        """Значения кубического сплайна в точках (x, y)"""
        xs, ys, values = self.xs, self.ys, self.values
        if xs[-1] < xs[0]:
            xs, values = xs[::-1], values[::-1]
        if ys[-1] < ys[0]:
            ys, values = ys[::-1], values[:, ::-1]
        spline = RectBivariateSpline(xs, ys, values, kx=3, ky=3)
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return spline.ev(x, y)


def riemann_function(p: RiemannProblem, corner: Tuple[float, float], nodes: Tuple[int, int] = KERNEL_NODES,
                     tol: float = 1e-12, max_iter: int = 200,
                     source: Optional[Tuple[float, float]] = None) -> RiemannKernel:
    """
    Функция Римана на прямоугольнике между источником и углом

    G = a lam + b w + C nu, C = a_x + b_y - c;
    lam = nu_x = phi2' + int_{y0}^y G,  w = nu_y = phi1' + int_{x0}^x G,
    nu = phi1(y) + phi2(x) - 1 + int int G.

    Args:
        p: Задача (коэффициенты)
        corner: Противоположный источнику угол прямоугольника
        nodes: Интервалов по x и по y
        tol: Допуск на разность итераций
        max_iter: Предел итераций
        source: Источник (по умолчанию p.target)

    Raises:
        DomainError: Вырожденный прямоугольник
        FixedPointError: Итерации не сошлись
    """
    x0, y0 = source if source is not None else p.target
    x1, y1 = (float(v) for v in corner)
    if x1 == x0 or y1 == y0:
        raise DomainError(f"Прямоугольник ({x0}, {y0}) - ({x1}, {y1}) вырожден")
    xs = np.linspace(x0, x1, nodes[0] + 1)
    ys = np.linspace(y0, y1, nodes[1] + 1)
    X, Y = np.meshgrid(xs, ys, indexing='ij')

    a = _values(p.coefficient('a'), X, Y)
    b = _values(p.coefficient('b'), X, Y)
    C = _values(p.coefficient_x(), X, Y) + _values(p.coefficient_y(), X, Y) - _values(p.coefficient('c'), X, Y)

    a_trace = _values(p.coefficient('a'), x0, ys)
    b_trace = _values(p.coefficient('b'), xs, y0)
    phi1 = np.exp(cumulative_integral(a_trace, ys))
    phi2 = np.exp(cumulative_integral(b_trace, xs))
    dphi1 = (a_trace * phi1)[None, :]
    dphi2 = (b_trace * phi2)[:, None]
    base = phi1[None, :] + phi2[:, None] - 1.0

    nu = np.broadcast_to(base, X.shape).copy()
    lam = np.broadcast_to(dphi2, X.shape).copy()
    w = np.broadcast_to(dphi1, X.shape).copy()
    gaps: List[float] = []
    for iteration in range(1, max_iter + 1):
        G = a * lam + b * w + C * nu
        lam_next = dphi2 + cumulative_integral(G, ys, axis=1)
        w_next = dphi1 + cumulative_integral(G, xs, axis=0)
        nu_next = base + cumulative_integral(cumulative_integral(G, ys, axis=1), xs, axis=0)
        gap = float(max(np.max(np.abs(nu_next - nu)), np.max(np.abs(lam_next - lam)),
                        np.max(np.abs(w_next - w))))
        gaps.append(gap)
        nu, lam, w = nu_next, lam_next, w_next
        if not np.isfinite(gap):
            break
        if gap <= tol * max(1.0, float(np.max(np.abs(nu)))):
            logger.debug(f"Функция Римана: {iteration} итераций, разность {gap:.3g}")
            return RiemannKernel(xs=xs, ys=ys, values=nu, iterations=iteration, gaps=gaps)
    logger.error(f"Итерации функции Римана не сошлись: последняя разность {gaps[-1]:.3g}")
    raise FixedPointError(f"Система Вольтерра не сошлась за {max_iter} итераций", last_gap=gaps[-1])


def riemann_goursat_solve(p: RiemannProblem, nodes: Tuple[int, int] = KERNEL_NODES, tol: float = 1e-12,
                          max_iter: int = 200) -> float:
    """
    u(P) = nu(S) u(S) + int_{x1}^{x0} nu(x, y1)(phi2' + b phi2) dx
           + int_{y1}^{y0} nu(x1, y)(phi1' + a phi1) dy + int int nu F

    phi1 = u(x1, y), phi2 = u(x, y1), S = (x1, y1).

    Raises:
        DomainError: Данные не согласованы в угле
    """
    if p.kind != 'goursat':
        raise DomainError("riemann_goursat_solve принимает только задачу Гурса")
    x1, y1 = (float(v) for v in p.corner)
    mismatch = abs(float(p.goursat_y(np.float64(y1))) - float(p.goursat_x(np.float64(x1))))
    if mismatch > CORNER_TOL:
        raise DomainError(f"Данные Гурса не согласованы в угле: расхождение {mismatch:.3g}")
    kernel = riemann_function(p, (x1, y1), nodes, tol, max_iter)
    xs, ys, nu = kernel.xs, kernel.ys, kernel.values

    phi2 = np.broadcast_to(np.asarray(p.goursat_x(xs), dtype=float), xs.shape)
    phi1 = np.broadcast_to(np.asarray(p.goursat_y(ys), dtype=float), ys.shape)
    along_x = nu[:, -1] * (_derivative(p.goursat_x, xs) + _values(p.coefficient('b'), xs, y1) * phi2)
    along_y = nu[-1, :] * (_derivative(p.goursat_y, ys) + _values(p.coefficient('a'), x1, ys) * phi1)
    X, Y = np.meshgrid(xs, ys, indexing='ij')
    area = nu * _values(p.source(), X, Y)

    corner_term = nu[-1, -1] * phi1[-1]
    line_x = -cumulative_integral(along_x, xs)[-1]
    line_y = -cumulative_integral(along_y, ys)[-1]
    double = cumulative_integral(cumulative_integral(area, ys, axis=1), xs, axis=0)[-1, -1]
    value = float(corner_term + line_x + line_y + double)
    logger.info(f"Задача Гурса: u{p.target} = {value:.12g}")
    return value


def _curve_foot(mu: Callable, x0: float, y0: float) -> float:
    """x_B < x0 с mu(x_B) = y0"""
    step = max(1.0, abs(x0))
    for _ in range(60):
        left = x0 - step
        if mu(left) - y0 > 0:
            return float(brentq(lambda s: mu(s) - y0, left, x0, xtol=1e-14, rtol=1e-14))
        step *= 2.0
    raise DomainError(f"Горизонтальная характеристика y={y0} не пересекает кривую данных")


def riemann_cauchy_solve(p: RiemannProblem, nodes: Tuple[int, int] = KERNEL_NODES, quad_nodes: int = 48,
                         tol: float = 1e-12, max_iter: int = 200) -> float:
    """
    Решение задачи Коши с данными на кривой y = mu(x)

    Замена u = v + Phi, Phi = phi0(x) + (y - mu(x)) phi1(x), даёт v с нулевыми
    данными Коши и правой частью F1 = F - L Phi; тогда
    u(P) = Phi(P) + int int_{PAB} nu F1 по криволинейному треугольнику.

    Raises:
        DomainError: mu' >= 0 на отрезке или точка не выше кривой
    """
    if p.kind != 'cauchy':
        raise DomainError("riemann_cauchy_solve принимает только задачу Коши")
    x0, y0 = p.target
    mu = p.mu
    if not y0 > mu(x0):
        raise DomainError(f"Точка ({x0}, {y0}) не лежит выше кривой данных")
    x_b = _curve_foot(mu, x0, y0)
    samples = np.linspace(x_b, x0, 65)
    slope = np.asarray(p.dmu(samples), dtype=float) if p.dmu is not None else _derivative(mu, samples)
    if np.any(slope >= 0):
        raise DomainError("Кривая данных должна строго убывать: mu'(x) < 0")

    a, b, c = p.coefficient('a'), p.coefficient('b'), p.coefficient('c')
    F = p.source()

    def dmu(x):
        return np.asarray(p.dmu(x), dtype=float) if p.dmu is not None else _derivative(mu, x)

    def F1(x, y):
        m = np.asarray(mu(x), dtype=float)
        f0, f1 = np.asarray(p.phi0(x), dtype=float), np.asarray(p.phi1(x), dtype=float)
        d0, d1 = _derivative(p.phi0, x), _derivative(p.phi1, x)
        phi_x = d0 + (y - m) * d1 - dmu(x) * f1
        phi = f0 + (y - m) * f1
        return (_values(F, x, y) - d1 - _values(a, x, y) * phi_x - _values(b, x, y) * f1
                - _values(c, x, y) * phi)

    kernel = riemann_function(p, (x_b, float(mu(x0))), nodes, tol, max_iter)
    xq, wx = gauss_legendre(x_b, x0, quad_nodes)
    sq, ws = gauss_legendre(0.0, 1.0, quad_nodes)
    m = np.asarray(mu(xq), dtype=float)
    height = y0 - m
    X = np.broadcast_to(xq[:, None], (quad_nodes, quad_nodes))
    Y = m[:, None] + height[:, None] * sq[None, :]
    integrand = kernel(X, Y) * F1(X, Y)
    double = float(np.sum(integrand * ws[None, :] * (wx * height)[:, None]))

    shift = float(p.phi0(np.float64(x0))) + (y0 - float(mu(x0))) * float(p.phi1(np.float64(x0)))
    value = shift + double
    logger.info(f"Задача Коши на кривой: u{p.target} = {value:.12g}")
    return value
