#!/usr/bin/env python3
"""
Запуск задач по типу: решение, проверка, исследование сходимости
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence

import numpy as np
import sympy as sp

from cli.expressions import compile_derivative, compile_expression, parse_expression
from cli.problem_file import ProblemFile
from core.errors import ParseError
from core.fields import FieldSpec
from core.grids import SpaceGrid, TimeGrid
from core.tables import SolutionTable
from solvers.first_order_pde import (HJProblem, ck_series_solve, poisson_ck_system, series_residual,
                                     solve_clairaut, solve_nonlinear_hj, solve_quasilinear_hj)
from solvers.ode_core import fundamental_matrix, liouville_check, solve_ivp
from solvers.second_order_pde import (BallProblem, MixedBVP, RiemannProblem, WaveProblem, ball_dirichlet_solve,
                                      dalembert_solve, evaluator, fourier_hyperbolic_solve, fourier_parabolic_solve,
                                      heat_kernel_mass, heat_solve, kirchhoff_solve, max_principle_check,
                                      observed_order, poisson_kernel_mass, riemann_goursat_solve,
                                      wave2d_poisson_solve, wave_residual)
from solvers.stochastic import SDEProblem, wz_convergence_study

logger = logging.getLogger(__name__)

STATE_NAMES = ('x', 'y', 'z')


@dataclass(frozen=True)
class Check:
    """Строка отчёта: имя проверки, значение, допуск, результат"""

    name: str
    value: object
    tolerance: object
    passed: bool

    def row(self) -> List[object]:
        return [self.name, self.value, self.tolerance, self.passed]


@dataclass
class RunResult:
    """Таблица результата и проверки для отчёта"""

    header: List[str]
    rows: List[List[object]]
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


def _table_result(table: SolutionTable, checks: Sequence[Check] = ()) -> RunResult:
    return RunResult(table.header(), table.to_rows(), list(checks))


def _time_grid(pf: ProblemFile) -> TimeGrid:
    return TimeGrid(pf.number('t0', 0.0, 'grid'), pf.number('t1', section='grid'), pf.integer('nt'))


def _space_grid(pf: ProblemFile) -> SpaceGrid:
    lower = pf.numbers('x_lower', 'grid')
    upper = pf.numbers('x_upper', 'grid')
    counts = [int(v) for v in pf.numbers('nx', 'grid')]
    return SpaceGrid(lower, upper, counts)


def _dim(pf: ProblemFile, default: int = 1) -> int:
    dim = pf.integer('dim', default, 'parameters')
    if dim not in (1, 2, 3):
        raise ParseError(f"Размерность должна быть 1, 2 или 3, получено {dim}")
    return dim


def _coordinate_names(dim: int) -> tuple:
    return ('x',) if dim == 1 else tuple(f"x{i + 1}" for i in range(dim))


# --- solve ---

def solve_ivp_kind(pf: ProblemFile, seed: int) -> RunResult:
    """y' = f(t, y), компоненты состояния x, y, z; выражения f1..fn"""
    y0 = pf.numbers('y0')
    dim = len(y0)
    if dim > 3:
        raise ParseError("Поддерживается не более трёх компонент состояния")
    names = ('t',) + STATE_NAMES[:dim]
    components = [pf.expression(f"f{i + 1}", names) for i in range(dim)]

    def func(t, y):
        args = [y[..., i] for i in range(dim)]
        return np.stack([np.broadcast_to(c(t, *args), y.shape[:-1]) for c in components], axis=-1)

    grid = _time_grid(pf)
    trajectory = solve_ivp(FieldSpec(func, dim, name=pf.name), grid.t0, y0, grid)
    flag = bool(trajectory.diagnostics.get('non_unique', False))
    return RunResult(trajectory.header(), trajectory.to_rows(),
                     [Check('unique_solution', not flag, True, not flag)])


def solve_heat(pf: ProblemFile, seed: int) -> RunResult:
    grid = _space_grid(pf)
    phi = pf.point_expression('phi', grid.dim)
    a = pf.number('diffusivity', 1.0)
    times = np.asarray(pf.numbers('times', 'grid'))
    points = grid.points()
    values = np.stack([np.asarray(heat_solve(phi, float(t), points, diffusivity=a)) for t in times])
    table = SolutionTable((times,) + tuple(grid.axes), ('t',) + _coordinate_names(grid.dim), values, "heat-poisson")
    return _table_result(table)


def _wave_problem(pf: ProblemFile, dim: int) -> WaveProblem:
    source = pf.time_point_expression('f', dim) if pf.has('f') else None
    return WaveProblem(dim=dim, c0=pf.number('c0', 1.0), u0=pf.point_expression('u0', dim),
                       u1=pf.point_expression('u1', dim, '0'), f=source)


def _wave_table(pf: ProblemFile, dim: int, point_solver: Callable) -> RunResult:
    grid = _space_grid(pf)
    if grid.dim != dim:
        raise ParseError(f"Сетка должна иметь размерность {dim}, получено {grid.dim}")
    times = np.asarray(pf.numbers('times', 'grid'))
    points = grid.points()
    values = np.empty((len(times),) + grid.shape)
    for i, t in enumerate(times):
        for index in np.ndindex(*grid.shape):
            values[(i,) + index] = point_solver(float(t), points[index])
    table = SolutionTable((times,) + tuple(grid.axes), ('t',) + _coordinate_names(dim), values, f"wave{dim}d")
    return _table_result(table)


def solve_wave1d(pf: ProblemFile, seed: int) -> RunResult:
    p = _wave_problem(pf, 1)
    grid = _space_grid(pf)
    times = np.asarray(pf.numbers('times', 'grid'))
    x = grid.axes[0]
    values = np.stack([np.asarray(dalembert_solve(p, float(t), x)) for t in times])
    return _table_result(SolutionTable((times, x), ('t', 'x'), values, "dalembert"))


def solve_wave2d(pf: ProblemFile, seed: int) -> RunResult:
    p = _wave_problem(pf, 2)
    return _wave_table(pf, 2, lambda t, P: wave2d_poisson_solve(p, t, P[0], P[1]) if t > 0 else
                       float(np.asarray(p.u0(P))))


def solve_wave3d(pf: ProblemFile, seed: int) -> RunResult:
    p = _wave_problem(pf, 3)
    return _wave_table(pf, 3, lambda t, P: kirchhoff_solve(p, t, P) if t > 0 else float(np.asarray(p.u0(P))))


def _hj_problem(pf: ProblemFile, kind: str) -> HJProblem:
    grid = _space_grid(pf)
    if grid.dim != 1:
        raise ParseError("Файлы задач описывают уравнения первого порядка на прямой")
    u0 = pf.point_expression('u0', 1)
    common = dict(u0=u0, x_grid=grid, t_grid=_time_grid(pf),
                  compat_tol=pf.tolerance('compat', 1e-6), newton_tol=pf.tolerance('newton', 1e-10))
    if kind == 'nonlinear':
        names = ('t', 'x', 'u', 'p')
        H = pf.expression('H', names)
        Hx, Hu, Hp = (compile_derivative(pf.parameters['H'], names, wrt) for wrt in ('x', 'u', 'p'))

        def partials(t, x, u, p):
            args = (t, x[..., 0], u, p[..., 0])
            return Hx(*args)[..., None], Hu(*args), Hp(*args)[..., None]

        return HJProblem(kind='nonlinear', hamiltonian=lambda t, x, u, p: H(t, x[..., 0], u, p[..., 0]),
                         hamiltonian_partials=partials, **common)
    g = pf.expression('g', ('t', 'x', 'u'))
    L = pf.expression('L', ('t', 'x', 'u'), '0')
    return HJProblem(kind='quasilinear',
                     g=lambda t, x, u: np.asarray(g(t, x[..., 0], u))[..., None],
                     L=lambda t, x, u: L(t, x[..., 0], u), **common)


def solve_hj_quasilinear(pf: ProblemFile, seed: int) -> RunResult:
    return _table_result(solve_quasilinear_hj(_hj_problem(pf, 'quasilinear')))


def solve_hj_nonlinear(pf: ProblemFile, seed: int) -> RunResult:
    u_table, p_table, report = solve_nonlinear_hj(_hj_problem(pf, 'nonlinear'))
    rows = [u_row + [p_row[-1]] for u_row, p_row in zip(u_table.to_rows(), p_table.to_rows())]
    check = Check('strip_compatibility', report.worst, report.tol, report.passed)
    return RunResult(u_table.header(('u', 'p')), rows, [check])


def solve_clairaut_kind(pf: ProblemFile, seed: int) -> RunResult:
    """y = x a(z) + b(z); производные a, b берутся символьно"""
    z = sp.Symbol('z')
    functions = {}
    for key in ('a', 'b'):
        expr = parse_expression(pf.parameters.get(key, ''), ('z',))
        functions[key] = sp.lambdify(z, expr, modules='numpy')
        functions[f"d{key}"] = sp.lambdify(z, sp.diff(expr, z), modules='numpy')
    curve = solve_clairaut(functions['a'], functions['b'], functions['da'], functions['db'],
                           pf.numbers('init'), _time_grid(pf))
    tol = pf.tolerance('residual', 1e-8)
    checks = [Check('equation_residual', curve.residual, tol, curve.residual <= tol),
              Check('folds', len(curve.folds), 0, not curve.folds)]
    return RunResult(['t', 'x', 'y', 'z'], curve.table.to_rows(), checks)


def solve_ck_poisson(pf: ProblemFile, seed: int) -> RunResult:
    f = parse_expression(pf.parameters.get('f', ''), ('t', 'x'))
    order = pf.integer('order', 8, 'parameters')
    system = poisson_ck_system(f)
    solution = ck_series_solve(system, order)
    residual = series_residual(system, solution)
    check = Check('series_residual', float(residual), 0, residual == 0)
    rows = [list(row) for row in solution.coefficient_rows(2)]
    return RunResult(['l', 'k', 'numerator', 'denominator'], rows, [check])


def _mixed_problem(pf: ProblemFile, kind: str) -> MixedBVP:
    phi1 = compile_expression(pf.parameters['phi1'], ('x',)) if pf.has('phi1') else None
    return MixedBVP(kind=kind, interval=(pf.number('A'), pf.number('B')), coefficient=pf.number('coefficient', 1.0),
                    phi0=compile_expression(pf.parameters.get('phi0', ''), ('x',)),
                    times=pf.numbers('times', 'grid'), u_A=pf.number('u_A', 0.0), u_B=pf.number('u_B', 0.0),
                    phi1=phi1, modes=pf.integer('modes', 32, 'parameters'), n_x=pf.integer('nx', 100))


def solve_fourier_parabolic(pf: ProblemFile, seed: int) -> RunResult:
    solution = fourier_parabolic_solve(_mixed_problem(pf, 'parabolic-dirichlet'))
    return _table_result(solution.table, [Check('compatible_data', solution.compatible, True, solution.compatible)])


def solve_fourier_hyperbolic(pf: ProblemFile, seed: int) -> RunResult:
    kind = pf.parameters.get('boundary', 'dirichlet').strip()
    if kind not in ('dirichlet', 'neumann'):
        raise ParseError(f"boundary должно быть dirichlet или neumann, получено '{kind}'")
    solution = fourier_hyperbolic_solve(_mixed_problem(pf, f"hyperbolic-{kind}"))
    return _table_result(solution.table, [Check('compatible_data', solution.compatible, True, solution.compatible)])


def _ball_problem(pf: ProblemFile) -> BallProblem:
    return BallProblem(data=pf.point_expression('lambda', 3, '1'), radius=pf.number('radius', 1.0),
                       center=tuple(pf.numbers('center', default=(0.0, 0.0, 0.0))))


def solve_ball_dirichlet(pf: ProblemFile, seed: int) -> RunResult:
    p = _ball_problem(pf)
    grid = _space_grid(pf)
    points = grid.points()
    inside = np.linalg.norm(points - np.asarray(p.center), axis=-1) < p.radius * (1.0 - 1e-9)
    values = np.full(grid.shape, np.nan)
    values[inside] = ball_dirichlet_solve(p, points[inside])
    table = SolutionTable(tuple(grid.axes), _coordinate_names(3), values, "poisson-ball", mask=inside)
    tol = pf.tolerance('kernel', 1e-8)
    mass = poisson_kernel_mass(p, np.asarray(p.center))
    return _table_result(table, [Check('poisson_kernel_mass', mass, tol, abs(mass - 1.0) <= tol)])


def solve_riemann_goursat(pf: ProblemFile, seed: int) -> RunResult:
    names = ('x', 'y')
    coefficients = {key: pf.expression(key, names, '0') for key in ('a', 'b', 'c', 'F')}
    target = tuple(pf.numbers('target'))
    p = RiemannProblem(target=target, kind='goursat', corner=tuple(pf.numbers('corner')),
                       goursat_x=pf.expression('goursat_x', ('x',)), goursat_y=pf.expression('goursat_y', ('y',)),
                       **coefficients)
    nodes = pf.integer('nodes', 64)
    value = riemann_goursat_solve(p, (nodes, nodes))
    return RunResult(['x', 'y', 'u'], [[target[0], target[1], value]])


# --- verify ---

def verify_heat_kernel(pf: ProblemFile, seed: int) -> RunResult:
    tol = pf.tolerance('kernel', 1e-8)
    rows, checks = [], []
    for t in pf.numbers('times', 'grid'):
        mass = heat_kernel_mass(t, pf.number('x', 0.0), pf.integer('nodes', 64, 'parameters'),
                                pf.number('diffusivity', 1.0))
        rows.append([t, mass])
        checks.append(Check(f"heat_kernel_mass_t={t:g}", mass, tol, abs(mass - 1.0) <= tol))
    return RunResult(['t', 'mass'], rows, checks)


def verify_poisson_kernel(pf: ProblemFile, seed: int) -> RunResult:
    p = _ball_problem(pf)
    tol = pf.tolerance('kernel', 1e-8)
    y = np.asarray(pf.numbers('point', default=p.center))
    mass = poisson_kernel_mass(p, y)
    return RunResult(['x1', 'x2', 'x3', 'mass'], [list(y) + [mass]],
                     [Check('poisson_kernel_mass', mass, tol, abs(mass - 1.0) <= tol)])


def verify_max_principle(pf: ProblemFile, seed: int) -> RunResult:
    """Кандидат u на сетке; для heat первая ось - время (переменная t)"""
    kind = pf.parameters.get('equation', 'harmonic').strip()
    grid = _space_grid(pf)
    if kind in ('heat', 'parabolic-A'):
        times = _time_grid(pf).nodes
        u = pf.expression('u', ('t',) + STATE_NAMES[:grid.dim])
        points = grid.points()
        values = np.stack([u(t, *(points[..., i] for i in range(grid.dim))) for t in times])
        table = SolutionTable((times,) + tuple(grid.axes), ('t',) + _coordinate_names(grid.dim), values, "candidate")
    else:
        u = pf.point_expression('u', grid.dim)
        table = SolutionTable(tuple(grid.axes), _coordinate_names(grid.dim), u(grid.points()), "candidate")
    A = None
    if kind.endswith('-A'):
        entries = pf.numbers('A')
        n = int(round(np.sqrt(len(entries))))
        A = np.asarray(entries).reshape(n, n)
    tol = pf.tolerance('max_principle', 1e-12)
    report = max_principle_check(table, kind, A, tol)
    excess = max(report.max_value - report.boundary_max, report.boundary_min - report.min_value)
    checks = [Check('max_principle', excess, tol, report.passed)]
    checks += [Check(f"witness_{i + 1}", float(w), '', report.passed) for i, w in enumerate(report.witness)]
    rows = [[report.max_value, report.min_value, report.boundary_max, report.boundary_min]]
    return RunResult(['max', 'min', 'boundary_max', 'boundary_min'], rows, checks)


def verify_liouville(pf: ProblemFile, seed: int) -> RunResult:
    """Элементы A задаются выражениями a11, a12, ... от t"""
    n = pf.integer('n', 2, 'parameters')
    entries = [[pf.expression(f"a{i + 1}{j + 1}", ('t',), '0') for j in range(n)] for i in range(n)]

    def A(t):
        return np.array([[float(e(t)) for e in row] for row in entries])

    grid = _time_grid(pf)
    table = fundamental_matrix(A, grid.t0, grid)
    tol = pf.tolerance('liouville', 1e-6)
    report = liouville_check(A, table, tol)
    rows = [[x, d] for x, d in zip(table.nodes, table.determinants)]
    return RunResult(['t', 'det'], rows, [Check('liouville_relative', report.relative_residual, tol, report.passed)])


# --- converge ---

def converge_wong_zakai(pf: ProblemFile, seed: int) -> RunResult:
    """Скалярное уравнение dx = f dt + g o dw; exact(t, x0, w) - выражение от t, x (= x0), y (= w)"""
    f = pf.expression('f', ('t', 'x'))
    g = pf.expression('g', ('t', 'x'))
    drift = FieldSpec(lambda t, y: np.asarray(f(t, y[..., 0]))[..., None], 1, name="drift")
    noise = FieldSpec(lambda t, y: np.asarray(g(t, y[..., 0]))[..., None], 1, name="noise")
    exact = None
    if pf.has('exact'):
        closed = pf.expression('exact', ('t', 'x', 'y'))

        def exact(t, x0, w):
            return np.asarray(closed(t, x0[0], w[..., 0]))[..., None]

    problem = SDEProblem(drift, (noise,), [pf.number('x0', 1.0)], pf.number('T', 1.0), exact=exact)
    n_steps = pf.integer('nt', 0) or None
    study = wz_convergence_study(problem, pf.numbers('eps'), pf.integer('n_paths', 1000, 'parameters'), seed,
                                 n_steps=n_steps, min_slope=pf.tolerance('min_slope', 0.8))
    checks = [Check('slope', study.slope, pf.tolerance('min_slope', 0.8), study.passed),
              Check('constant', study.constant, '', bool(np.isfinite(study.constant)))]
    return RunResult(list(study.HEADER), [list(row) for row in study.rows], checks)


def converge_wave_residual(pf: ProblemFile, seed: int) -> RunResult:
    dim = _dim(pf)
    p = _wave_problem(pf, dim)
    evaluate = evaluator(p)
    t = pf.number('t', 1.0)
    point = pf.numbers('point')
    h0 = pf.number('h', 0.1)
    steps = [h0 / factor for factor in pf.numbers('factors')]
    if len(steps) < 2:
        raise ParseError("Для оценки порядка нужно не менее двух множителей измельчения")
    residuals = [wave_residual(evaluate, p.c0, t, point, h) for h in steps]
    order = observed_order(steps, residuals)
    expected = pf.tolerance('order', 2.0)
    band = pf.tolerance('band', 0.25) * expected
    rows = [[h, r] for h, r in zip(steps, residuals)]
    return RunResult(['h', 'residual'], rows, [Check('observed_order', order, expected, abs(order - expected) <= band)])


SOLVE: Dict[str, Callable[[ProblemFile, int], RunResult]] = {
    'ivp': solve_ivp_kind,
    'heat': solve_heat,
    'wave1d': solve_wave1d,
    'wave2d': solve_wave2d,
    'wave3d': solve_wave3d,
    'hj-quasilinear': solve_hj_quasilinear,
    'hj-nonlinear': solve_hj_nonlinear,
    'clairaut': solve_clairaut_kind,
    'ck-poisson': solve_ck_poisson,
    'fourier-parabolic': solve_fourier_parabolic,
    'fourier-hyperbolic': solve_fourier_hyperbolic,
    'ball-dirichlet': solve_ball_dirichlet,
    'riemann-goursat': solve_riemann_goursat,
}

VERIFY: Dict[str, Callable[[ProblemFile, int], RunResult]] = {
    'heat-kernel': verify_heat_kernel,
    'poisson-kernel': verify_poisson_kernel,
    'max-principle': verify_max_principle,
    'liouville': verify_liouville,
}

CONVERGE: Dict[str, Callable[[ProblemFile, int], RunResult]] = {
    'wong-zakai': converge_wong_zakai,
    'wave-residual': converge_wave_residual,
}

REGISTRIES = {'solve': SOLVE, 'verify': VERIFY, 'converge': CONVERGE}


def dispatch(verb: str, pf: ProblemFile, seed: int) -> RunResult:
    """
    Raises:
        ParseError: Тип задачи не зарегистрирован для команды
    """
    registry = REGISTRIES[verb]
    runner = registry.get(pf.kind)
    if runner is None:
        raise ParseError(f"Неизвестный тип задачи '{pf.kind}' для команды {verb}; "
                         f"допустимые: {', '.join(sorted(registry))}")
    logger.info(f"Команда {verb}: тип {pf.kind}")
    return runner(pf, seed)
