#!/usr/bin/env python3
"""
Степенные ряды Коши-Ковалевской для систем u_t = A(t, x, u) u_x + b(t, x, u)

Коэффициенты c_lk при t^l x^k считаются точно в рациональной
арифметике sympy. Ненулевые данные Коши u(0, x) = u0(x) сдвигаются:
u = v + u0, и ряд строится для v с нулевыми данными.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from core.errors import DomainError, NonConvergenceError, OrderLimitError, UnsupportedError

logger = logging.getLogger(__name__)

T, X = sp.symbols('t x')

# Предел числителя и знаменателя коэффициента
MAGNITUDE_LIMIT = sp.Integer(10) ** 100


def state_symbols(n: int) -> Tuple[sp.Symbol, ...]:
    """Символы компонент решения u1..un"""
    return tuple(sp.symbols(f'u1:{n + 1}'))


def _rational(expr) -> sp.Expr:
    return sp.nsimplify(sp.sympify(expr), rational=True)


@dataclass(frozen=True)
class CKSystem:
    """
    Система первого порядка u_t = A u_x + b

    Args:
        A: Матрица n x n многочленов от t, x, u1..un
        b: Вектор длины n
        u0: Данные Коши - многочлены от x (None - нулевые)
        name: Имя системы для журнала
    """

    A: sp.Matrix
    b: sp.Matrix
    u0: Optional[Tuple[sp.Expr, ...]] = None
    name: str = "system"

    def __post_init__(self):
        A = sp.Matrix(self.A).applyfunc(_rational)
        b = sp.Matrix(self.b).reshape(A.shape[0], 1).applyfunc(_rational)
        if A.shape[0] != A.shape[1]:
            raise DomainError(f"Матрица A должна быть квадратной, получено {A.shape}")
        object.__setattr__(self, 'A', A)
        object.__setattr__(self, 'b', b)
        if self.u0 is not None:
            data = tuple(_rational(e) for e in self.u0)
            if len(data) != A.shape[0]:
                raise DomainError(f"Ожидалось {A.shape[0]} компонент данных, получено {len(data)}")
            object.__setattr__(self, 'u0', data)

    @property
    def size(self) -> int:
        return self.A.shape[0]

    @property
    def symbols(self) -> Tuple[sp.Symbol, ...]:
        return state_symbols(self.size)

    def check_polynomial(self):
        """
        Raises:
            UnsupportedError: Коэффициент или данные не многочлен
        """
        allowed = {T, X, *self.symbols}
        for expr in list(self.A) + list(self.b):
            if expr.atoms(sp.NumberSymbol, sp.Float):
                raise UnsupportedError(f"Коэффициент {expr} должен быть рациональным")
            if not expr.free_symbols <= allowed or not expr.is_polynomial(T, X, *self.symbols):
                raise UnsupportedError(f"Коэффициент {expr} не является многочленом от t, x, u")
        for expr in self.u0 or ():
            if not expr.free_symbols <= {X} or not expr.is_polynomial(X):
                raise UnsupportedError(f"Данные Коши {expr} должны быть многочленом от x")


def _terms(expr) -> List[Tuple[Tuple[int, int], sp.Rational]]:
    expr = sp.expand(expr)
    if expr == 0:
        return []
    return sp.Poly(expr, T, X).terms()


def _truncate(expr, order: int) -> sp.Expr:
    """Отбросить мономы полной степени выше order"""
    return sp.Add(*[c * T ** i * X ** j for (i, j), c in _terms(expr) if i + j <= order])


def _integrate_t(expr, order: int) -> sp.Expr:
    """Первообразная по t с нулём при t = 0, усечённая до степени order"""
    return sp.Add(*[c / (i + 1) * T ** (i + 1) * X ** j for (i, j), c in _terms(expr) if i + j + 1 <= order])


def _check_magnitude(exprs: Sequence[sp.Expr], order: int):
    for expr in exprs:
        for _, c in _terms(expr):
            p, q = sp.fraction(sp.Rational(c))
            if abs(p) > MAGNITUDE_LIMIT or abs(q) > MAGNITUDE_LIMIT:
                raise OrderLimitError(f"Коэффициент ряда превысил 10^100 при порядке {order}")


@dataclass(frozen=True)
class SeriesSolution2D:
    """
    Ряд u_j(t, x) = sum c_jlk t^l x^k, l + k <= order

    Args:
        coefficients: c[j][l][k] как sympy.Rational
        order: Порядок усечения N
        base_point: Точка разложения (t, x)
        iterations: Число итераций до стабилизации
    """

    coefficients: Tuple[Tuple[Tuple[sp.Rational, ...], ...], ...]
    order: int
    base_point: Tuple[float, float] = (0.0, 0.0)
    iterations: int = 0
    diagnostics: Dict[str, object] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.coefficients)

    def coefficient(self, j: int, l: int, k: int) -> sp.Rational:
        return self.coefficients[j][l][k]

    def polynomial(self, j: int = 0) -> sp.Expr:
        """Многочлен компоненты j от символов t, x"""
        c = self.coefficients[j]
        return sp.Add(*[c[l][k] * T ** l * X ** k
                        for l in range(self.order + 1) for k in range(self.order + 1 - l)])

    def evaluate(self, t, x, j: int = 0) -> np.ndarray:
        func = sp.lambdify((T, X), self.polynomial(j), modules='numpy')
        t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
        return np.broadcast_to(np.asarray(func(t, x), dtype=float), t.shape)

    def coefficient_rows(self, j: int = 0) -> List[Tuple[int, int, int, int]]:
        """Строки (l, k, числитель, знаменатель) для экспорта"""
        rows = []
        for l in range(self.order + 1):
            for k in range(self.order + 1 - l):
                p, q = sp.fraction(self.coefficients[j][l][k])
                rows.append((l, k, int(p), int(q)))
        return rows


def _coefficient_table(expr, order: int) -> Tuple[Tuple[sp.Rational, ...], ...]:
    table = [[sp.Integer(0)] * (order + 1) for _ in range(order + 1)]
    for (i, j), c in _terms(expr):
        table[i][j] = sp.Rational(c)
    return tuple(tuple(row) for row in table)


def _shifted(system: CKSystem) -> Tuple[sp.Matrix, sp.Matrix]:
    """A и b для v = u - u0: A(v + u0), A(v + u0) u0' + b(v + u0)"""
    if system.u0 is None:
        return system.A, system.b
    shift = {s: s + u for s, u in zip(system.symbols, system.u0)}
    A = system.A.xreplace(shift)
    b = system.b.xreplace(shift) + A * sp.Matrix([sp.diff(u, X) for u in system.u0])
    return A, b


def _evolution_rhs(A: sp.Matrix, b: sp.Matrix, symbols, U: Sequence[sp.Expr]) -> List[sp.Expr]:
    values = dict(zip(symbols, U))
    Ux = [sp.diff(u, X) for u in U]
    n = len(U)
    return [sp.expand(sum((A[i, j].xreplace(values) * Ux[j] for j in range(n)), sp.Integer(0))
                      + b[i].xreplace(values)) for i in range(n)]


def ck_series_solve(system: CKSystem, order: int) -> SeriesSolution2D:
    """
    Коэффициенты ряда решения до полной степени order

    Итерация U <- int_0^t (A(U) U_x + b(U)) dt в кольце многочленов,
    усечённых по степени; каждая итерация уточняет ещё один порядок по t.

    Raises:
        DomainError: order < 1
        UnsupportedError: Неполиномиальные коэффициенты
        OrderLimitError: Рост коэффициентов за 10^100
    """
    if order < 1:
        raise DomainError(f"Порядок ряда должен быть >= 1, получено {order}")
    system.check_polynomial()
    A, b = _shifted(system)
    symbols = system.symbols
    n = system.size

    U = [sp.Integer(0)] * n
    for iteration in range(1, order + 3):
        rhs = _evolution_rhs(A, b, symbols, U)
        new = [_integrate_t(r, order) for r in rhs]
        _check_magnitude(new, order)
        if all(sp.expand(a - c) == 0 for a, c in zip(new, U)):
            break
        U = new
    else:
        raise NonConvergenceError(f"Ряд системы {system.name} не стабилизировался за {order + 2} итераций")

    if system.u0 is not None:
        U = [_truncate(u + d, order) for u, d in zip(U, system.u0)]
    coefficients = tuple(_coefficient_table(u, order) for u in U)
    logger.info(f"Ряд Коши-Ковалевской системы {system.name} порядка {order}: {iteration} итераций")
    return SeriesSolution2D(coefficients=coefficients, order=order, iterations=iteration)


def series_residual(system: CKSystem, solution: SeriesSolution2D, through: Optional[int] = None) -> sp.Rational:
    """
    Наибольший модуль коэффициента невязки u_t - A(u) u_x - b(u) до степени through

    По умолчанию through = N - 2; точный ряд даёт ноль.
    """
    through = solution.order - 2 if through is None else through
    U = [solution.polynomial(j) for j in range(solution.size)]
    rhs = _evolution_rhs(system.A, system.b, system.symbols, U)
    worst = sp.Integer(0)
    for u, r in zip(U, rhs):
        for _, c in _terms(_truncate(sp.diff(u, T) - r, through)):
            worst = max(worst, abs(sp.Rational(c)))
    return worst


def poisson_ck_system(f) -> CKSystem:
    """
    Система первого порядка для u_tt + u_xx = f(t, x), u = u_t = 0 при t = 0

    Компоненты: u1 = u_x, u2 = u_t, u3 = u. Искомая функция - компонента 2 (индекс с нуля).
    """
    _, u2, _ = state_symbols(3)
    A = sp.Matrix([[0, 1, 0], [-1, 0, 0], [0, 0, 0]])
    b = sp.Matrix([0, sp.sympify(f), u2])
    return CKSystem(A=A, b=b, name="poisson")


@dataclass(frozen=True)
class MajorantEstimate:
    """
    Радиус сходимости по мажоранте

    T = rho / (16 M N), W(t, x) = [rho - x - sqrt((rho - x)^2 - 4 M N rho t)] / (2N)
    """

    M: float
    N: int
    rho: float
    T: float

    def W(self, t: float, x: float) -> float:
        """
        Raises:
            DomainError: (t, x) вне области |x| < min(sqrt(rho), rho), 0 <= t < T или дискриминант отрицателен
        """
        if abs(x) >= min(np.sqrt(self.rho), self.rho) or t < 0 or t >= self.T:
            raise DomainError(f"Точка (t={t}, x={x}) вне области мажоранты")
        disc = (self.rho - x) ** 2 - 4.0 * self.M * self.N * self.rho * t
        if disc < 0:
            raise DomainError(f"Отрицательный дискриминант мажоранты в точке (t={t}, x={x})")
        return float((self.rho - x - np.sqrt(disc)) / (2.0 * self.N))


def ck_majorant_radius(M: float, N: int, rho: float) -> MajorantEstimate:
    """
    Raises:
        DomainError: M, N или rho не положительны
    """
    if not (M > 0 and N > 0 and rho > 0):
        raise DomainError(f"M, N, rho должны быть положительны: M={M}, N={N}, rho={rho}")
    return MajorantEstimate(M=float(M), N=int(N), rho=float(rho), T=float(rho) / (16.0 * M * N))
