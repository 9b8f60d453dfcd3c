#!/usr/bin/env python3
"""
Тесты принципа максимума и невязки Эйлера-Лагранжа
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.errors import DomainError
from core.grids import SpaceGrid
from core.tables import SolutionTable
from solvers.second_order_pde import Lagrangian, euler_lagrange_residual, max_principle_check, spd_sqrt


def _table(grid: SpaceGrid, func, mask=None) -> SolutionTable:
    X, Y = np.meshgrid(*grid.axes, indexing='ij')
    return SolutionTable(grid.axes, ('x', 'y'), func(X, Y), "test", mask=mask)


class TestMaxPrinciple:
    """Тесты проверки экстремумов на границе"""

    def test_harmonic(self, square_grid):
        report = max_principle_check(_table(square_grid, lambda x, y: x ** 2 - y ** 2), 'harmonic')
        assert report.passed
        assert report.max_value == pytest.approx(1.0)
        assert report.boundary_min == pytest.approx(-1.0)

    def test_interior_maximum(self, square_grid):
        report = max_principle_check(_table(square_grid, lambda x, y: -(x ** 2 + y ** 2)), 'harmonic')
        assert not report.passed
        np.testing.assert_allclose(report.witness, [0.0, 0.0], atol=1e-12)

    def test_interior_minimum(self, square_grid):
        report = max_principle_check(_table(square_grid, lambda x, y: x ** 2 + y ** 2), 'harmonic')
        assert not report.passed
        assert report.min_value == pytest.approx(0.0)

    def test_masked_disk(self, square_grid):
        X, Y = np.meshgrid(*square_grid.axes, indexing='ij')
        disk = X ** 2 + Y ** 2 <= 1.0
        report = max_principle_check(_table(square_grid, lambda x, y: x * y, mask=disk), 'harmonic')
        assert report.passed
        assert report.max_value <= 0.5

    def test_heat_parabolic_boundary(self):
        t = np.linspace(0.0, 1.0, 11)
        x = np.linspace(0.0, np.pi, 21)
        T, X = np.meshgrid(t, x, indexing='ij')
        report = max_principle_check(SolutionTable((t, x), ('t', 'x'), np.exp(-T) * np.sin(X), "test"), 'heat')
        assert report.passed

    def test_heat_growing_inside(self):
        """Максимум на последнем слое внутри отрезка нарушает принцип"""
        t = np.linspace(0.0, 1.0, 11)
        x = np.linspace(0.0, np.pi, 21)
        T, X = np.meshgrid(t, x, indexing='ij')
        report = max_principle_check(SolutionTable((t, x), ('t', 'x'), np.exp(T) * np.sin(X), "test"), 'heat')
        assert not report.passed
        assert report.witness[0] == pytest.approx(1.0)

    def test_elliptic_matrix(self, square_grid):
        A = [[2.0, 0.5], [0.5, 1.0]]
        report = max_principle_check(_table(square_grid, lambda x, y: x * y), 'elliptic-A', A=A)
        assert report.passed
        np.testing.assert_allclose(report.transform @ report.transform, np.linalg.inv(A), atol=1e-12)

    def test_matrix_required(self, square_grid):
        with pytest.raises(DomainError):
            max_principle_check(_table(square_grid, lambda x, y: x), 'elliptic-A')

    def test_unknown_kind(self, square_grid):
        with pytest.raises(DomainError):
            max_principle_check(_table(square_grid, lambda x, y: x), 'wave')


class TestSpdSqrt:
    """Тесты корня из SPD-матрицы"""

    def test_square(self):
        A = np.array([[4.0, 1.0], [1.0, 3.0]])
        root = spd_sqrt(A)
        np.testing.assert_allclose(root @ root, A, atol=1e-12)
        np.testing.assert_allclose(root, root.T, atol=1e-14)

    @settings(deadline=None, max_examples=30)
    @given(st.lists(st.floats(min_value=-2.0, max_value=2.0), min_size=9, max_size=9))
    def test_reconstruction(self, entries):
        """B B^T + I восстанавливается из корня"""
        B = np.asarray(entries).reshape(3, 3)
        A = B @ B.T + np.eye(3)
        root = spd_sqrt(A)
        np.testing.assert_allclose(root @ root, A, atol=1e-9)
        assert np.all(np.linalg.eigvalsh(root) > 0)

    @pytest.mark.parametrize("A", [[[1.0, 2.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, -1.0]], [[1.0, 0.0, 0.0]]])
    def test_rejects(self, A):
        with pytest.raises(DomainError):
            spd_sqrt(A)


class TestEulerLagrange:
    """Тесты невязки Эйлера-Лагранжа"""

    dirichlet = Lagrangian(lambda x, z, u: 0.5 * np.sum(u ** 2, axis=-1))

    def test_harmonic_extremal(self, square_grid):
        residual = euler_lagrange_residual(self.dirichlet, lambda x: x[..., 0] ** 2 - x[..., 1] ** 2, square_grid)
        assert residual.max_abs < 1e-6
        assert residual.field.shape == (17, 17)

    def test_non_extremal(self, square_grid):
        residual = euler_lagrange_residual(self.dirichlet, lambda x: x[..., 0] ** 2 + x[..., 1] ** 2, square_grid)
        np.testing.assert_allclose(residual.field, -4.0, atol=1e-6)

    def test_analytic_partials(self):
        """L = (z^2 + z'^2) / 2: экстремаль exp(x)"""
        lagrangian = Lagrangian(lambda x, z, u: 0.5 * (z ** 2 + np.sum(u ** 2, axis=-1)),
                                dz=lambda x, z, u: z, du=lambda x, z, u: u)
        grid = SpaceGrid.interval(0.0, 1.0, 200)
        assert euler_lagrange_residual(lagrangian, lambda x: np.exp(x[..., 0]), grid).max_abs < 1e-3
        assert euler_lagrange_residual(lagrangian, lambda x: np.sin(x[..., 0]), grid).max_abs > 0.5
