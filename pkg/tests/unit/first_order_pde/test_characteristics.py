#!/usr/bin/env python3
"""
Тесты метода характеристик
"""

import time

import numpy as np
import pytest

from core.errors import CausticError, DomainError
from core.grids import SpaceGrid, TimeGrid
from solvers.first_order_pde import HJProblem, hj_residual, solve_nonlinear_hj, solve_quasilinear_hj, strip_at


def _transport(a: float, u0, t1: float = 0.5) -> HJProblem:
    return HJProblem(kind='linear', u0=u0, x_grid=SpaceGrid.interval(-1.0, 1.0, 20), t_grid=TimeGrid(0.0, t1, 10),
                     g=lambda t, x, u: np.full(x.shape, a), L=lambda t, x, u: np.zeros(x.shape[:-1]))


class TestQuasilinear:
    """Тесты линейных и квазилинейных уравнений"""

    def test_transport(self):
        """S_t + a S_x = 0: S = phi(x - a t)"""
        table = solve_quasilinear_hj(_transport(0.7, lambda x: np.sin(x[..., 0])))
        t, x = np.meshgrid(table.axes[0], table.axes[1], indexing='ij')
        assert np.max(np.abs(table.values - np.sin(x - 0.7 * t))) < 1e-8

    def test_pure_source(self):
        """g = 0, L = c: S = u0 + c t"""
        problem = HJProblem(kind='quasilinear', u0=lambda x: x[..., 0] ** 2, x_grid=SpaceGrid.interval(0.0, 1.0, 10),
                            t_grid=TimeGrid(0.0, 1.0, 5), g=lambda t, x, u: np.zeros(x.shape),
                            L=lambda t, x, u: np.full(np.shape(u), 2.0))
        table = solve_quasilinear_hj(problem)
        t, x = np.meshgrid(table.axes[0], table.axes[1], indexing='ij')
        assert np.max(np.abs(table.values - (x ** 2 + 2.0 * t))) < 1e-10

    def test_residual(self):
        problem = _transport(1.0, lambda x: np.cos(x[..., 0]))
        residual = hj_residual(problem, solve_quasilinear_hj(problem))
        assert residual.max_residual < 0.05
        assert residual.interior_nodes == 9 * 19

    def test_kind_mismatch(self):
        problem = HJProblem(kind='nonlinear', u0=lambda x: x[..., 0], x_grid=SpaceGrid.interval(0.0, 1.0, 4),
                            t_grid=TimeGrid(0.0, 0.1, 2), hamiltonian=lambda t, x, u, p: p[..., 0])
        with pytest.raises(DomainError):
            solve_quasilinear_hj(problem)

    def test_missing_coefficients(self):
        with pytest.raises(DomainError):
            HJProblem(kind='quasilinear', u0=lambda x: x[..., 0], x_grid=SpaceGrid.interval(0.0, 1.0, 4),
                      t_grid=TimeGrid(0.0, 0.1, 2))


class TestHamiltonJacobi:
    """Тесты уравнения u_t + H(t, x, u, u_x) = 0"""

    @staticmethod
    def _problem(u0, lower, upper, t1, n_t=10):
        return HJProblem(kind='nonlinear', u0=u0, x_grid=SpaceGrid.interval(lower, upper, 16),
                         t_grid=TimeGrid(0.0, t1, n_t), hamiltonian=lambda t, x, u, p: -p[..., 0] ** 2)

    def test_constant_gradient(self):
        """u_t = u_x^2, u(0, x) = c x: u = c x + c^2 t"""
        c = 0.8
        u_table, p_table, report = solve_nonlinear_hj(self._problem(lambda x: c * x[..., 0], -1.0, 1.0, 0.5))
        t, x = np.meshgrid(u_table.axes[0], u_table.axes[1], indexing='ij')
        assert np.max(np.abs(u_table.values - (c * x + c * c * t))) < 1e-8
        assert np.max(np.abs(p_table.values[..., 0] - c)) < 1e-8
        assert report.passed

    def test_before_caustic(self):
        """До каустики решение удовлетворяет уравнению"""
        problem = self._problem(lambda x: np.cos(x[..., 0]), -1.0, 1.0, 0.2)
        u_table, p_table, report = solve_nonlinear_hj(problem)
        assert report.passed
        assert hj_residual(problem, u_table, p_table).max_residual < 0.05

    def test_caustic(self):
        """u0 = cos x: характеристики x = xi + 2t sin xi пересекаются при t = 1/2 около xi = pi"""
        problem = self._problem(lambda x: np.cos(x[..., 0]), 2.0, 4.5, 1.0, n_t=20)
        with pytest.raises(CausticError) as info:
            solve_nonlinear_hj(problem)
        assert 0.4 <= info.value.t <= 0.6, f"Каустика при t={info.value.t}"
        assert 2.0 <= info.value.x[0] <= 4.5

    def test_strip(self):
        """Полоса с меткой 0 для u0 = c x: p постоянно, x(t) = -2 c t"""
        c = 0.5
        problem = self._problem(lambda x: c * x[..., 0], -1.0, 1.0, 0.5)
        strip = strip_at(problem, [0.0], 10)
        assert float(strip.p[0]) == pytest.approx(c)
        assert float(strip.x[0]) == pytest.approx(-2.0 * c * 0.5)
        assert float(strip.u) == pytest.approx(-c * c * 0.5)

    def test_inversion_diagnostics(self):
        """Внутренние метки обращаются по сплайну, граничные - интегрированием"""
        problem = self._problem(lambda x: np.cos(x[..., 0]), -np.pi, np.pi, 0.2)
        u_table, _, _ = solve_nonlinear_hj(problem)
        exact = u_table.diagnostics['exact_inversions']
        assert len(exact) == len(u_table.axes[0])
        assert max(exact) <= 4
        assert max(u_table.diagnostics['inversion_residual']) <= problem.newton_tol

    def test_analytic_partials(self):
        """Аналитические H_x, H_u, H_p дают то же решение, что и разности"""
        u0 = lambda x: np.sin(x[..., 0])
        numeric = self._problem(u0, -1.0, 1.0, 0.2)
        analytic = HJProblem(kind='nonlinear', u0=u0, x_grid=numeric.x_grid, t_grid=numeric.t_grid,
                             hamiltonian=numeric.hamiltonian,
                             hamiltonian_partials=lambda t, x, u, p: (np.zeros(x.shape), np.zeros(u.shape), -2.0 * p))
        u_numeric, _, _ = solve_nonlinear_hj(numeric)
        u_analytic, _, _ = solve_nonlinear_hj(analytic)
        np.testing.assert_allclose(u_analytic.values, u_numeric.values, atol=1e-7)

    @pytest.mark.slow
    def test_cosine_data_accuracy(self):
        """u_t = u_x^2, u0 = cos x на 200 узлах до t = 0.1"""
        problem = HJProblem(kind='nonlinear', u0=lambda x: np.cos(x[..., 0]),
                            x_grid=SpaceGrid.interval(-np.pi, np.pi, 200), t_grid=TimeGrid(0.0, 0.1, 50),
                            hamiltonian=lambda t, x, u, p: -p[..., 0] ** 2,
                            hamiltonian_partials=lambda t, x, u, p: (np.zeros(x.shape), np.zeros(u.shape), -2.0 * p))
        started = time.perf_counter()
        u_table, p_table, report = solve_nonlinear_hj(problem)
        elapsed = time.perf_counter() - started
        assert hj_residual(problem, u_table, p_table).max_residual < 1e-3
        assert report.worst < 1e-6
        assert elapsed < 10.0, f"Решение заняло {elapsed:.1f} с"
