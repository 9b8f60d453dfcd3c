#!/usr/bin/env python3
"""
Тесты первых интегралов и уравнений Клеро-Лагранжа
"""

import numpy as np
import pytest

from core.errors import DomainError
from core.fields import FieldSpec
from core.grids import TimeGrid
from solvers.first_order_pde import solve_clairaut, verify_first_integral


class TestFirstIntegral:
    """Тесты проверки первого интеграла"""

    samples = np.array([[1.0, 0.0], [0.3, -0.7], [-1.2, 0.4]])

    def test_hamiltonian_energy(self):
        """Энергия (p^2 + q^2)/2 гамильтоновой системы"""
        f = FieldSpec.autonomous(lambda y: np.stack([y[..., 1], -y[..., 0]], axis=-1), 2, name="hamilton")
        report = verify_first_integral(lambda y: 0.5 * np.sum(y ** 2, axis=-1), f, self.samples)
        assert report.passed
        assert report.gradient_residual < 1e-8
        assert report.drift < 1e-8

    def test_constant_is_flagged(self):
        f = FieldSpec.constant([1.0, 0.0])
        report = verify_first_integral(lambda y: np.ones(y.shape[:-1]), f, self.samples)
        assert report.gradient_residual == 0.0
        assert report.is_constant
        assert not report.passed
        assert report.note == "constant (not a first integral)"

    def test_transverse_coordinate(self):
        """f = (1, 0), u = y"""
        report = verify_first_integral(lambda y: y[..., 1], FieldSpec.constant([1.0, 0.0]), self.samples,
                                       gradient=lambda y: np.broadcast_to([0.0, 1.0], y.shape))
        assert report.gradient_residual == 0.0
        assert report.passed

    def test_not_an_integral(self, rotation_field):
        report = verify_first_integral(lambda y: y[..., 0], rotation_field, self.samples)
        assert not report.passed
        assert report.gradient_residual > 0.1


class TestClairaut:
    """Тесты характеристик уравнения y = x a(y') + b(y')"""

    grid = TimeGrid(0.0, 1.0, 100)

    def test_clairaut_line(self):
        """a(z) = z, b(z) = z^2, (1, 2, 1): прямая y = x + 1"""
        curve = solve_clairaut(lambda z: z, lambda z: z ** 2, lambda z: 1.0, lambda z: 2.0 * z,
                               (1.0, 2.0, 1.0), self.grid)
        x, y = curve.table.states[:, 0], curve.table.states[:, 1]
        assert curve.stationary
        assert curve.residual < 1e-8
        assert np.max(np.abs(y - x - 1.0)) < 1e-8
        assert curve.slope_residual < 1e-6
        assert curve.folds == []

    def test_lines_through_origin(self):
        """b = 0: y = C x"""
        curve = solve_clairaut(lambda z: z, lambda z: 0.0 * z, lambda z: 1.0, lambda z: 0.0,
                               (2.0, 1.0, 0.5), self.grid)
        x, y = curve.table.states[:, 0], curve.table.states[:, 1]
        assert np.max(np.abs(y - 0.5 * x)) < 1e-8

    def test_lagrange_form(self):
        """a(z) = 2z: z не стационарна, уравнение сохраняется"""
        curve = solve_clairaut(lambda z: 2.0 * z, lambda z: z ** 2, lambda z: 2.0, lambda z: 2.0 * z,
                               (1.0, 3.0, 1.0), TimeGrid(0.0, 0.5, 200))
        assert not curve.stationary
        assert curve.residual < 1e-6

    def test_inconsistent_start(self):
        with pytest.raises(DomainError):
            solve_clairaut(lambda z: z, lambda z: z ** 2, lambda z: 1.0, lambda z: 2.0 * z,
                           (1.0, 5.0, 1.0), self.grid)
