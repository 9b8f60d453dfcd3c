#!/usr/bin/env python3
"""
Тесты ньютонова потенциала и гармонических функций в шаре
"""

import numpy as np
import pytest

from core.errors import DomainError, UnsupportedError
from solvers.second_order_pde import (BallProblem, ball_dirichlet_solve, ball_neumann_recover, newtonian_potential,
                                      normal_derivative, poisson_kernel_mass, potential_values)


def _uniform(y):
    return np.ones(y.shape[:-1])


class TestNewtonianPotential:
    """Тесты потенциала однородного шара: u = 2 pi (R^2 - r^2 / 3) внутри"""

    def test_center(self):
        assert potential_values(_uniform, [[0.0, 0.0, 0.0]])[0] == pytest.approx(2.0 * np.pi, rel=1e-10)

    def test_interior_profile(self):
        points = np.array([[0.5, 0.0, 0.0], [0.2, -0.3, 0.1]])
        r2 = np.sum(points ** 2, axis=-1)
        np.testing.assert_allclose(potential_values(_uniform, points), 2.0 * np.pi * (1.0 - r2 / 3.0), rtol=1e-6)

    def test_poisson_equation(self):
        report = newtonian_potential(_uniform, [[0.0, 0.0, 0.0], [0.3, 0.2, 0.0], [0.97, 0.0, 0.0]])
        assert report.skipped == [2]
        assert np.isnan(report.residual[2])
        assert report.relative_residual < 1e-4

    def test_points_in_space(self):
        with pytest.raises(DomainError):
            newtonian_potential(_uniform, [[0.0, 0.0]])


class TestBall:
    """Тесты формулы Пуассона в шаре"""

    def test_linear_data(self):
        p = BallProblem(lambda x: x[..., 0])
        assert ball_dirichlet_solve(p, [0.3, 0.2, -0.1]) == pytest.approx(0.3, abs=1e-6)

    def test_shifted_ball(self):
        p = BallProblem(lambda x: x[..., 0] * x[..., 1], radius=2.0, center=(1.0, 0.0, 0.0))
        assert ball_dirichlet_solve(p, [1.5, 0.5, 0.2]) == pytest.approx(0.75, abs=1e-6)

    def test_kernel_mass(self):
        assert poisson_kernel_mass(BallProblem(_uniform), [0.2, 0.1, 0.4]) == pytest.approx(1.0, abs=1e-6)

    def test_outside_point(self):
        with pytest.raises(DomainError):
            ball_dirichlet_solve(BallProblem(_uniform), [1.0, 0.0, 0.0])

    def test_only_three_dimensions(self):
        with pytest.raises(UnsupportedError):
            BallProblem(_uniform, dim=2)

    def test_neumann_recovery(self):
        """Нормальная производная x1 на единичной сфере: h = x1"""
        p = BallProblem(lambda x: x[..., 0], kind='neumann-recovery')
        assert ball_neumann_recover(p, [0.4, -0.2, 0.3]) == pytest.approx(0.4, abs=1e-6)

    def test_neumann_nonzero_mean(self):
        with pytest.raises(DomainError):
            ball_neumann_recover(BallProblem(_uniform, kind='neumann-recovery'), [0.0, 0.0, 0.0])

    def test_normal_derivative(self):
        p = BallProblem(_uniform)
        values = normal_derivative(lambda P: np.sum(P ** 2, axis=-1), p, [[1.0, 0.0, 0.0], [0.0, 1.0, 1.0]])
        np.testing.assert_allclose(values, [2.0, 2.0], atol=1e-9)
