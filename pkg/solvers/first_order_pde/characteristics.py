#!/usr/bin/env python3
"""
Метод характеристик для уравнений первого порядка

Линейные и квазилинейные уравнения
    S_t + <g(t, x, S), S_x> = L(t, x, S)
и уравнение Гамильтона-Якоби
    u_t + H(t, x, u, u_x) = 0.
Полосы (x, p, u) выпускаются из решётки меток xi, отображение
xi -> x(t, xi) обращается демпфированным методом Ньютона по сплайну
решётки, продвинутой на текущий слой; метки вне решётки обращаются
интегрированием полос от t0.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.interpolate import RectBivariateSpline, RegularGridInterpolator, make_interp_spline

from core.errors import CausticError, DomainError, StripError
from core.fields import central_difference_jacobian, numerical_gradient
from core.grids import SpaceGrid, TimeGrid
from core.tables import SolutionTable
from solvers.ode_core import rk4_step

logger = logging.getLogger(__name__)

KINDS = ('linear', 'quasilinear', 'nonlinear')

# Шаг по меткам для якобиана внутри итераций Ньютона
NEWTON_DELTA = 1e-6
# Шаг по меткам для якобиана и условия согласования на решётке
LATTICE_DELTA = 1e-5
# Порог вырождения якобиана отображения xi -> x
CAUSTIC_DET = 1e-8
MAX_HALVINGS = 8


@dataclass(frozen=True)
class HJProblem:
    """
    Задача Коши для уравнения первого порядка

    Args:
        kind: linear | quasilinear | nonlinear
        u0: Данные Коши u0(x), x формы (..., d)
        x_grid: Выходная пространственная сетка
        t_grid: Сетка по времени, начальный момент t_grid.t0
        hamiltonian: H(t, x, u, p) для kind=nonlinear
        g: Скорость переноса g(t, x, u) формы (..., d)
        L: Источник L(t, x, u)
        grad_u0: Градиент данных, иначе центральные разности
        hamiltonian_partials: (H_x, H_u, H_p) аналитически, иначе разности
        lattice_factor: Во сколько раз решётка меток гуще выходной сетки
        newton_tol: Допуск невязки обращения
        newton_max: Предельное число шагов Ньютона
        compat_tol: Допуск условия согласования полос
        substeps: Шагов RK4 на интервал сетки по времени
    """

    kind: str
    u0: Callable
    x_grid: SpaceGrid
    t_grid: TimeGrid
    hamiltonian: Optional[Callable] = None
    g: Optional[Callable] = None
    L: Optional[Callable] = None
    grad_u0: Optional[Callable] = None
    hamiltonian_partials: Optional[Callable] = None
    lattice_factor: int = 4
    newton_tol: float = 1e-10
    newton_max: int = 50
    compat_tol: float = 1e-6
    substeps: int = 4

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"Неизвестный тип уравнения '{self.kind}', допустимые: {', '.join(KINDS)}")
        if self.kind == 'nonlinear' and self.hamiltonian is None:
            raise DomainError("Для нелинейного уравнения нужен гамильтониан H(t, x, u, p)")
        if self.kind != 'nonlinear' and (self.g is None or self.L is None):
            raise DomainError("Для квазилинейного уравнения нужны g(t, x, u) и L(t, x, u)")
        if self.lattice_factor < 1 or self.substeps < 1 or self.newton_max < 1:
            raise DomainError("lattice_factor, substeps и newton_max должны быть >= 1")

    @property
    def t0(self) -> float:
        return self.t_grid.t0

    @property
    def dim(self) -> int:
        return self.x_grid.dim

    def initial_value(self, x: np.ndarray) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.u0(x), dtype=float), x.shape[:-1]).copy()

    def initial_gradient(self, x: np.ndarray) -> np.ndarray:
        if self.grad_u0 is not None:
            return np.broadcast_to(np.asarray(self.grad_u0(x), dtype=float), x.shape).copy()
        return numerical_gradient(self.initial_value, x)


@dataclass(frozen=True)
class CharStrip:
    """Характеристическая полоса в момент t: метка, точка, импульс, значение"""

    label: np.ndarray
    x: np.ndarray
    p: Optional[np.ndarray]
    u: np.ndarray


@dataclass(frozen=True)
class CompatibilityReport:
    """
    Условие согласования полос lambda_k = du/dxi_k - <p, dx/dxi_k>

    Args:
        times: Узлы по времени
        max_by_time: max |lambda_k| на решётке в каждый момент
        tol: Допуск роста относительно начального момента
        passed: max |lambda(t)| <= max |lambda(t0)| + tol для всех t
    """

    times: np.ndarray
    max_by_time: np.ndarray
    tol: float
    passed: bool

    @property
    def worst(self) -> float:
        return float(np.max(self.max_by_time))


@dataclass(frozen=True)
class HJResidual:
    """Внутренняя разностная невязка уравнения и константа C в C (h_t + h_x^2)"""

    max_residual: float
    constant: float
    interior_nodes: int


class _QuasilinearStrips:
    """Состояние [x, u]: dx/dt = g, du/dt = L"""

    def __init__(self, problem: HJProblem):
        self.problem = problem
        self.dim = problem.dim

    def initial(self, xi: np.ndarray) -> np.ndarray:
        return np.concatenate([xi, self.problem.initial_value(xi)[..., None]], axis=-1)

    def rhs(self, t, state):
        d = self.dim
        x, u = state[..., :d], state[..., d]
        dx = np.broadcast_to(np.asarray(self.problem.g(t, x, u), dtype=float), x.shape)
        du = np.broadcast_to(np.asarray(self.problem.L(t, x, u), dtype=float), u.shape)
        return np.concatenate([dx, du[..., None]], axis=-1)

    def position(self, state):
        return state[..., :self.dim]

    def value(self, state):
        return state[..., self.dim]

    def momentum(self, state):
        return None


class _HamiltonianStrips:
    """Состояние [x, p, u]: x' = H_p, p' = -(H_x + p H_u), u' = -H + <p, H_p>"""

    def __init__(self, problem: HJProblem):
        self.problem = problem
        self.dim = problem.dim

    def initial(self, xi: np.ndarray) -> np.ndarray:
        u = self.problem.initial_value(xi)
        p = self.problem.initial_gradient(xi)
        return np.concatenate([xi, p, u[..., None]], axis=-1)

    def _hamiltonian(self, t, x, u, p):
        return np.broadcast_to(np.asarray(self.problem.hamiltonian(t, x, u, p), dtype=float), u.shape)

    def _partials(self, t, x, u, p):
        if self.problem.hamiltonian_partials is not None:
            Hx, Hu, Hp = self.problem.hamiltonian_partials(t, x, u, p)
            return (np.broadcast_to(np.asarray(Hx, dtype=float), x.shape),
                    np.broadcast_to(np.asarray(Hu, dtype=float), u.shape),
                    np.broadcast_to(np.asarray(Hp, dtype=float), p.shape))
        d = self.dim
        z = np.concatenate([x, u[..., None], p], axis=-1)
        grad = central_difference_jacobian(
            lambda w: self._hamiltonian(t, w[..., :d], w[..., d], w[..., d + 1:]), z)
        return grad[..., :d], grad[..., d], grad[..., d + 1:]

    def rhs(self, t, state):
        d = self.dim
        x, p, u = state[..., :d], state[..., d:2 * d], state[..., 2 * d]
        Hx, Hu, Hp = self._partials(t, x, u, p)
        H = self._hamiltonian(t, x, u, p)
        dp = -(Hx + p * Hu[..., None])
        du = -H + np.sum(p * Hp, axis=-1)
        return np.concatenate([Hp, dp, du[..., None]], axis=-1)

    def position(self, state):
        return state[..., :self.dim]

    def value(self, state):
        return state[..., 2 * self.dim]

    def momentum(self, state):
        return state[..., self.dim:2 * self.dim]


def _shifted_labels(xi: np.ndarray, delta: float) -> np.ndarray:
    """Пакет [xi, xi + delta e_1, xi - delta e_1, ...] по новой первой оси"""
    d = xi.shape[-1]
    batch = [xi]
    for k in range(d):
        shift = np.zeros(d)
        shift[k] = delta
        batch.extend([xi + shift, xi - shift])
    return np.stack(batch)


def _label_derivatives(values: np.ndarray, delta: float) -> np.ndarray:
    """Центральные разности по меткам из пакета _shifted_labels, ось метки последняя"""
    d = (values.shape[0] - 1) // 2
    columns = [(values[1 + 2 * k] - values[2 + 2 * k]) / (2.0 * delta) for k in range(d)]
    return np.stack(columns, axis=-1)


class _CharacteristicSolver:
    """Интегрирование полос, контроль каустик и обращение по слоям времени"""

    def __init__(self, problem: HJProblem, strips):
        self.problem = problem
        self.strips = strips
        self.nodes = problem.t_grid.nodes
        self.diagnostics: Dict[str, List] = {'inversion_residual': [], 'newton_iterations': [],
                                             'min_jacobian': [], 'exact_inversions': [0]}

    def _advance(self, state: np.ndarray, start: int, stop: int) -> np.ndarray:
        for i in range(start, stop):
            t, t_next = self.nodes[i], self.nodes[i + 1]
            h = (t_next - t) / self.problem.substeps
            for k in range(self.problem.substeps):
                state = rk4_step(self.strips.rhs, t + k * h, state, h)
        return state

    def _lattice_states(self, lattice_grid: SpaceGrid, lattice: np.ndarray) -> Callable:
        """Сплайн состояния полос по меткам решётки; вне решётки nan"""
        central = lattice[0]
        axes = lattice_grid.axes
        order = min(5, min(lattice_grid.shape) - 1)
        order = order if order % 2 else order - 1
        if lattice_grid.dim == 1:
            spline = make_interp_spline(axes[0], central, k=order, axis=0)
            raw = lambda xi: spline(xi[..., 0])
        elif lattice_grid.dim == 2:
            parts = [RectBivariateSpline(axes[0], axes[1], central[..., j], kx=order, ky=order)
                     for j in range(central.shape[-1])]
            raw = lambda xi: np.stack([part.ev(xi[..., 0], xi[..., 1]) for part in parts], axis=-1)
        else:
            method = 'cubic' if order >= 3 else 'linear'
            parts = [RegularGridInterpolator(axes, central[..., j], method=method)
                     for j in range(central.shape[-1])]
            raw = lambda xi: np.stack([part(xi) for part in parts], axis=-1)
        lower = np.asarray(lattice_grid.lower, dtype=float)
        upper = np.asarray(lattice_grid.upper, dtype=float)

        def evaluate(xi: np.ndarray) -> np.ndarray:
            inside = np.all((xi >= lower) & (xi <= upper), axis=-1)
            clipped = np.where(np.isfinite(xi), np.clip(xi, lower, upper), lower)
            return np.where(inside[..., None], raw(clipped), np.nan)

        return evaluate

    def _exact_states(self, index: int) -> Callable:
        """Интегрирование полос от t0 до узла index"""
        return lambda xi: self._advance(self.strips.initial(xi), 0, index)

    def _newton(self, target: np.ndarray, seed: np.ndarray, evaluate: Callable):
        """
        Демпфированный метод Ньютона для x(xi) = target

        Точки с неконечной невязкой или якобианом выбывают и возвращаются
        с такой невязкой; решение о них принимает вызывающий.
        """
        tol = self.problem.newton_tol
        xi = seed.copy()
        for iteration in range(self.problem.newton_max + 1):
            states = evaluate(_shifted_labels(xi, NEWTON_DELTA))
            state = states[0]
            residual = self.strips.position(state) - target
            error = np.max(np.abs(residual), axis=-1)
            J = _label_derivatives(self.strips.position(states), NEWTON_DELTA)
            alive = np.isfinite(error) & np.all(np.isfinite(J), axis=(-2, -1))
            pending = alive & ~(error <= tol)
            if not np.any(pending) or iteration == self.problem.newton_max:
                return xi, state, np.where(alive | (error <= tol), error, np.inf), iteration
            step = np.zeros_like(xi)
            try:
                step[pending] = np.linalg.solve(J[pending], residual[pending][..., None])[..., 0]
            except np.linalg.LinAlgError:
                return xi, state, np.where(pending, np.inf, error), iteration
            scale = np.ones(error.shape)
            trial = xi - step
            for _ in range(MAX_HALVINGS):
                trial_error = np.max(np.abs(self.strips.position(evaluate(trial)) - target), axis=-1)
                worse = pending & ~(trial_error <= error)
                if not np.any(worse):
                    break
                scale[worse] *= 0.5
                trial = xi - scale[..., None] * step
            xi = trial
        return xi, state, error, iteration

    def _invert(self, target: np.ndarray, seed: np.ndarray, index: int, interpolate: Callable):
        """Обращение по сплайну решётки, точки вне решётки - точным интегрированием от t0"""
        t = float(self.nodes[index])
        tol = self.problem.newton_tol
        xi, state, error, iterations = self._newton(target, seed, interpolate)
        missing = ~(error <= tol)
        exact = int(np.count_nonzero(missing))
        if exact:
            xi_m, state_m, error_m, iterations_m = self._newton(target[missing], seed[missing],
                                                                self._exact_states(index))
            xi, state, error = xi.copy(), state.copy(), error.copy()
            xi[missing], state[missing], error[missing] = xi_m, state_m, error_m
            iterations = max(iterations, iterations_m)
        if not np.all(error <= tol):
            worst = np.unravel_index(int(np.argmax(np.where(np.isfinite(error), error, np.inf))), error.shape)
            logger.error(f"Обращение характеристик не сошлось при t={t}: невязка {error[worst]:.3g}")
            raise CausticError(f"Метод Ньютона не достиг допуска {tol} за {self.problem.newton_max} шагов",
                               t, target[worst])
        self.diagnostics['exact_inversions'].append(exact)
        return xi, state, float(error.max()), iterations

    def _check_lattice(self, lattice: np.ndarray, index: int) -> float:
        """Проверка невырожденности отображения на решётке, возвращает max |lambda|"""
        t = float(self.nodes[index])
        positions = self.strips.position(lattice)
        jac = _label_derivatives(positions, LATTICE_DELTA)
        dets = np.linalg.det(jac)
        k = int(np.argmin(dets))
        min_det = float(dets.ravel()[k])
        self.diagnostics['min_jacobian'].append(min_det)
        if not min_det > CAUSTIC_DET:
            where = positions[0].reshape(-1, positions.shape[-1])[k]
            logger.error(f"Каустика при t={t} около x={where}: det = {min_det:.3g}")
            raise CausticError(f"Якобиан характеристик вырожден (det = {min_det:.3g})", t, where)
        momentum = self.strips.momentum(lattice)
        if momentum is None:
            return 0.0
        du = _label_derivatives(self.strips.value(lattice), LATTICE_DELTA)
        lam = du - np.einsum('...i,...ik->...k', momentum[0], jac)
        return float(np.max(np.abs(lam)))

    def run(self):
        problem = self.problem
        grid = problem.x_grid
        targets = grid.points()
        lattice_grid = SpaceGrid(grid.lower, grid.upper, tuple(k * problem.lattice_factor for k in grid.n))
        lattice = self.strips.initial(_shifted_labels(lattice_grid.points(), LATTICE_DELTA))
        compat = [self._check_lattice(lattice, 0)]

        count = len(self.nodes)
        u_values = np.empty((count,) + grid.shape)
        u_values[0] = problem.initial_value(targets)
        p_values = np.empty((count,) + grid.shape + (grid.dim,))
        p_values[0] = problem.initial_gradient(targets)
        self.diagnostics['inversion_residual'].append(0.0)
        self.diagnostics['newton_iterations'].append(0)

        seed = targets.copy()
        for index in range(1, count):
            lattice = self._advance(lattice, index - 1, index)
            compat.append(self._check_lattice(lattice, index))
            interpolate = self._lattice_states(lattice_grid, lattice)
            seed, state, residual, iterations = self._invert(targets, seed, index, interpolate)
            seed = np.where(np.isfinite(seed), seed, targets)
            u_values[index] = self.strips.value(state)
            momentum = self.strips.momentum(state)
            if momentum is not None:
                p_values[index] = momentum
            self.diagnostics['inversion_residual'].append(residual)
            self.diagnostics['newton_iterations'].append(iterations)
            logger.debug(f"Слой t={self.nodes[index]:.6g}: {iterations} шагов Ньютона, невязка {residual:.3g}")
        return u_values, p_values, np.asarray(compat)


def _axes_names(dim: int) -> Tuple[str, ...]:
    return ('t', 'x') if dim == 1 else ('t',) + tuple(f"x{i + 1}" for i in range(dim))


def solve_quasilinear_hj(problem: HJProblem) -> SolutionTable:
    """
    Решение S(t, x) линейного или квазилинейного уравнения

    Returns:
        SolutionTable: Оси (t, x...), в diagnostics невязки обращения по слоям

    Raises:
        DomainError: Задача другого типа
        CausticError: Отображение характеристик вырождается
    """
    if problem.kind == 'nonlinear':
        raise DomainError("solve_quasilinear_hj принимает только linear и quasilinear")
    solver = _CharacteristicSolver(problem, _QuasilinearStrips(problem))
    u_values, _, _ = solver.run()
    logger.info(f"Квазилинейная задача решена на {len(solver.nodes)} слоях, "
                f"невязка обращения <= {max(solver.diagnostics['inversion_residual']):.3g}")
    axes = (solver.nodes,) + problem.x_grid.axes
    return SolutionTable(axes, _axes_names(problem.dim), u_values, "characteristics",
                         diagnostics=dict(solver.diagnostics))


def solve_nonlinear_hj(problem: HJProblem) -> Tuple[SolutionTable, SolutionTable, CompatibilityReport]:
    """
    Решение u(t, x) и p(t, x) = u_x уравнения Гамильтона-Якоби

    Returns:
        Tuple: Таблица u, таблица p (последняя ось - компоненты), отчёт о согласовании

    Raises:
        CausticError: Каустика либо расходимость обращения
        StripError: Нарушено условие согласования полос
    """
    if problem.kind != 'nonlinear':
        raise DomainError("solve_nonlinear_hj принимает только kind=nonlinear")
    solver = _CharacteristicSolver(problem, _HamiltonianStrips(problem))
    u_values, p_values, compat = solver.run()
    limit = compat[0] + problem.compat_tol
    report = CompatibilityReport(times=solver.nodes, max_by_time=compat, tol=problem.compat_tol,
                                 passed=bool(np.all(compat <= limit)))
    if not report.passed:
        k = int(np.argmax(compat))
        logger.error(f"Нарушено согласование полос при t={solver.nodes[k]}: {compat[k]:.3g}")
        raise StripError(f"Условие согласования полос нарушено: max |lambda| = {compat[k]:.3g} > {limit:.3g}")
    axes = (solver.nodes,) + problem.x_grid.axes
    names = _axes_names(problem.dim)
    diagnostics = dict(solver.diagnostics, compatibility=report.worst)
    u_table = SolutionTable(axes, names, u_values, "characteristics", diagnostics=diagnostics)
    p_table = SolutionTable(axes, names, p_values, "characteristics", diagnostics=diagnostics)
    logger.info(f"Уравнение Гамильтона-Якоби решено, max |lambda| = {report.worst:.3g}")
    return u_table, p_table, report


def hj_residual(problem: HJProblem, u_table: SolutionTable, p_table: Optional[SolutionTable] = None) -> HJResidual:
    """
    Разностная невязка уравнения во внутренних узлах

    Производные по t и x - центральные разности второго порядка.
    Если передана p_table, в гамильтониан подставляется p, иначе u_x.
    """
    nodes = u_table.axes[0]
    axes = u_table.axes[1:]
    if len(nodes) < 3 or any(len(a) < 3 for a in axes):
        raise DomainError("Для невязки нужно не менее трёх узлов по каждой оси")
    U = u_table.values
    grads = np.gradient(U, nodes, *axes)
    u_t = grads[0]
    u_x = np.stack(grads[1:], axis=-1)
    P = p_table.values if p_table is not None else u_x
    X = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1)
    interior = tuple(slice(1, -1) for _ in axes)

    worst = 0.0
    for k in range(1, len(nodes) - 1):
        t = float(nodes[k])
        if problem.kind == 'nonlinear':
            H = np.broadcast_to(np.asarray(problem.hamiltonian(t, X, U[k], P[k]), dtype=float), U[k].shape)
            residual = u_t[k] + H
        else:
            g = np.broadcast_to(np.asarray(problem.g(t, X, U[k]), dtype=float), X.shape)
            L = np.broadcast_to(np.asarray(problem.L(t, X, U[k]), dtype=float), U[k].shape)
            residual = u_t[k] + np.sum(g * u_x[k], axis=-1) - L
        worst = max(worst, float(np.max(np.abs(residual[interior]))))

    h_t = float(nodes[1] - nodes[0])
    h_x = max(float(a[1] - a[0]) for a in axes)
    count = (len(nodes) - 2) * int(np.prod([len(a) - 2 for a in axes]))
    return HJResidual(max_residual=worst, constant=worst / (h_t + h_x ** 2), interior_nodes=count)


def strip_at(problem: HJProblem, label, t_index: int) -> CharStrip:
    """Полоса с меткой label в узле сетки времени t_index"""
    strips = _HamiltonianStrips(problem) if problem.kind == 'nonlinear' else _QuasilinearStrips(problem)
    solver = _CharacteristicSolver(problem, strips)
    xi = np.asarray(label, dtype=float)
    state = solver._advance(strips.initial(xi), 0, t_index)
    return CharStrip(label=xi, x=strips.position(state), p=strips.momentum(state), u=strips.value(state))
