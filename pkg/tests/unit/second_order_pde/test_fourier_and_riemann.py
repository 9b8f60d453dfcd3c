#!/usr/bin/env python3
"""
Тесты разделения переменных и метода Римана
"""

import numpy as np
import pytest
from scipy.special import i0

from core.errors import DomainError
from core.grids import TimeGrid
from solvers.second_order_pde import (MixedBVP, RiemannProblem, fourier_hyperbolic_solve, fourier_parabolic_solve,
                                      riemann_cauchy_solve, riemann_function, riemann_goursat_solve)

TIMES = TimeGrid(0.0, 1.0, 4)


class TestFourierParabolic:
    """Тесты u_t = a^2 u_xx с условиями Дирихле"""

    def test_single_mode(self):
        """phi0 = sin x на [0, pi]: u = exp(-t) sin x"""
        solution = fourier_parabolic_solve(MixedBVP('parabolic-dirichlet', (0.0, np.pi), 1.0, np.sin, TIMES))
        t, x = np.meshgrid(*solution.table.axes, indexing='ij')
        np.testing.assert_allclose(solution.table.values, np.exp(-t) * np.sin(x), atol=1e-8)
        assert solution.compatible

    def test_affine_shift(self):
        """Стационарное решение 1 + x при u_A = 1, u_B = 2"""
        spec = MixedBVP('parabolic-dirichlet', (0.0, 1.0), 0.5, lambda x: 1.0 + x, TIMES, u_A=1.0, u_B=2.0)
        solution = fourier_parabolic_solve(spec)
        assert float(solution.evaluate(0.7, 0.25)) == pytest.approx(1.25, abs=1e-10)

    def test_incompatible_data(self):
        spec = MixedBVP('parabolic-dirichlet', (0.0, 1.0), 1.0, lambda x: np.zeros_like(x), TIMES, u_A=1.0)
        assert not fourier_parabolic_solve(spec).compatible

    def test_kind(self):
        with pytest.raises(DomainError):
            fourier_parabolic_solve(MixedBVP('hyperbolic-dirichlet', (0.0, 1.0), 1.0, np.sin, TIMES))

    @pytest.mark.parametrize("interval, coefficient, modes", [((1.0, 0.0), 1.0, 4), ((0.0, 1.0), 0.0, 4),
                                                              ((0.0, 1.0), 1.0, 0)])
    def test_invalid(self, interval, coefficient, modes):
        with pytest.raises(DomainError):
            MixedBVP('parabolic-dirichlet', interval, coefficient, np.sin, TIMES, modes=modes)


class TestFourierHyperbolic:
    """Тесты u_tt = c^2 u_xx"""

    def test_dirichlet_displacement(self):
        """phi0 = sin x: u = sin x cos t"""
        solution = fourier_hyperbolic_solve(MixedBVP('hyperbolic-dirichlet', (0.0, np.pi), 1.0, np.sin, TIMES))
        t, x = np.meshgrid(*solution.table.axes, indexing='ij')
        np.testing.assert_allclose(solution.table.values, np.sin(x) * np.cos(t), atol=1e-8)

    def test_dirichlet_velocity(self):
        """phi1 = sin x: u = sin x sin t"""
        spec = MixedBVP('hyperbolic-dirichlet', (0.0, np.pi), 1.0, lambda x: np.zeros_like(x), TIMES, phi1=np.sin)
        assert float(fourier_hyperbolic_solve(spec).evaluate(0.8, 1.0)) == pytest.approx(np.sin(1.0) * np.sin(0.8), abs=1e-8)

    def test_neumann(self):
        """phi0 = cos x: u = cos x cos t"""
        spec = MixedBVP('hyperbolic-neumann', (0.0, np.pi), 1.0, np.cos, TIMES)
        assert float(fourier_hyperbolic_solve(spec).evaluate(0.6, 0.4)) == pytest.approx(np.cos(0.4) * np.cos(0.6), abs=1e-8)

    def test_neumann_drift(self):
        """phi1 = 1 при нулевых потоках: u = t"""
        spec = MixedBVP('hyperbolic-neumann', (0.0, np.pi), 1.0, lambda x: np.zeros_like(x), TIMES,
                        phi1=lambda x: np.ones_like(x))
        assert float(fourier_hyperbolic_solve(spec).evaluate(0.9, 2.0)) == pytest.approx(0.9, abs=1e-8)

    def test_neumann_flux(self):
        spec = MixedBVP('hyperbolic-neumann', (0.0, 1.0), 1.0, np.cos, TIMES, u_A=1.0)
        with pytest.raises(DomainError):
            fourier_hyperbolic_solve(spec)


def _exp_data(s):
    return np.exp(s)


class TestRiemann:
    """Тесты метода Римана для u_xy + a u_x + b u_y + c u = F"""

    def test_kernel_bessel(self):
        """c = -1: nu = I0(2 sqrt((x - x0)(y - y0)))"""
        p = RiemannProblem((0.5, 0.5), c=lambda x, y: -np.ones(np.shape(x)), corner=(0.0, 0.0),
                           goursat_x=_exp_data, goursat_y=_exp_data)
        kernel = riemann_function(p, (0.0, 0.0))
        assert kernel.source == (0.5, 0.5)
        assert kernel.values[-1, -1] == pytest.approx(i0(1.0), rel=1e-4)
        assert float(kernel(0.25, 0.5)) == pytest.approx(1.0, abs=1e-8)

    def test_goursat_exponential(self):
        """u = exp(x + y) решает u_xy = u"""
        p = RiemannProblem((0.5, 0.5), c=lambda x, y: -np.ones(np.shape(x)), corner=(0.0, 0.0),
                           goursat_x=_exp_data, goursat_y=_exp_data)
        assert riemann_goursat_solve(p) == pytest.approx(np.e, rel=1e-3)

    def test_goursat_source(self):
        """u_xy = 1 с нулевыми данными: u = x y"""
        p = RiemannProblem((0.5, 0.8), F=lambda x, y: np.ones(np.shape(x)), corner=(0.0, 0.0),
                           goursat_x=np.zeros_like, goursat_y=np.zeros_like)
        assert riemann_goursat_solve(p) == pytest.approx(0.4, abs=1e-10)

    def test_goursat_corner_mismatch(self):
        p = RiemannProblem((0.5, 0.5), corner=(0.0, 0.0), goursat_x=np.zeros_like, goursat_y=_exp_data)
        with pytest.raises(DomainError):
            riemann_goursat_solve(p)

    def test_cauchy_on_antidiagonal(self):
        """u_xy = 1, u = u_y = 0 на y = -x: u = (x + y)^2 / 2"""
        p = RiemannProblem((1.0, 1.0), kind='cauchy', F=lambda x, y: np.ones(np.shape(x)),
                           mu=lambda x: -x, dmu=lambda x: -np.ones_like(x),
                           phi0=lambda x: np.zeros_like(x), phi1=lambda x: np.zeros_like(x))
        assert riemann_cauchy_solve(p) == pytest.approx(2.0, rel=1e-8)

    def test_cauchy_shift(self):
        """u = x + y: phi0 = 0, phi1 = 1 на y = -x"""
        p = RiemannProblem((0.5, 1.0), kind='cauchy', mu=lambda x: -x, dmu=lambda x: -np.ones_like(x),
                           phi0=lambda x: np.zeros_like(x), phi1=lambda x: np.ones_like(x))
        assert riemann_cauchy_solve(p) == pytest.approx(1.5, abs=1e-8)

    def test_point_below_curve(self):
        p = RiemannProblem((0.0, -1.0), kind='cauchy', mu=lambda x: -x,
                           phi0=lambda x: np.zeros_like(x), phi1=lambda x: np.zeros_like(x))
        with pytest.raises(DomainError):
            riemann_cauchy_solve(p)

    def test_missing_data(self):
        with pytest.raises(DomainError):
            RiemannProblem((0.5, 0.5), kind='goursat')

    def test_kernel_zero_coefficients(self):
        p = RiemannProblem((0.5, 0.5), corner=(0.0, 0.0), goursat_x=np.zeros_like, goursat_y=np.zeros_like)
        kernel = riemann_function(p, (0.0, 0.0))
        np.testing.assert_array_equal(kernel.values, 1.0)

    def test_kernel_constant_a(self):
        """a = alpha, b = c = 0: nu = exp(alpha (y - y0))"""
        alpha = 0.7
        p = RiemannProblem((0.5, 0.5), a=lambda x, y: np.full(np.shape(x), alpha), corner=(0.0, 0.0),
                           goursat_x=np.zeros_like, goursat_y=np.zeros_like)
        kernel = riemann_function(p, (0.0, 0.0))
        X, Y = np.meshgrid(kernel.xs, kernel.ys, indexing='ij')
        np.testing.assert_allclose(kernel.values, np.exp(alpha * (Y - 0.5)), atol=1e-6)

    @pytest.mark.slow
    def test_cauchy_manufactured(self):
        """u = x y^2 решает u_xy = 2y; данные на y = -x, сетка функции Римана 200 x 200"""
        p = RiemannProblem((1.0, 1.5), kind='cauchy', F=lambda x, y: 2.0 * y,
                           mu=lambda x: -x, dmu=lambda x: -np.ones_like(x),
                           phi0=lambda x: x ** 3, phi1=lambda x: -2.0 * x ** 2)
        assert riemann_cauchy_solve(p, nodes=(200, 200)) == pytest.approx(2.25, abs=1e-4)
