#!/usr/bin/env python3
"""
Тесты квадратурных правил
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.errors import DomainError
from core.quadrature import (QuadratureSpec, cumulative_integral, gauss_hermite, gauss_hermite_product,
                             gauss_legendre, sphere_rule, trapezoid_weights)


class TestGaussRules:
    """Тесты правил Гаусса"""

    def test_legendre_polynomial_exactness(self):
        """n узлов точны для многочленов степени 2n - 1"""
        x, w = gauss_legendre(0.0, 2.0, 4)
        assert np.sum(w * x ** 7) == pytest.approx(2.0 ** 8 / 8.0, rel=1e-12)

    def test_legendre_reversed_interval(self):
        """Для b < a интеграл меняет знак"""
        x, w = gauss_legendre(1.0, 0.0, 8)
        assert np.sum(w * x) == pytest.approx(-0.5)

    def test_hermite_moments(self):
        """E Z^2 = 1/2 для Z ~ N(0, 1/2)"""
        z, w = gauss_hermite(20)
        assert np.sum(w) == pytest.approx(1.0, abs=1e-14)
        assert np.sum(w * z ** 2) == pytest.approx(0.5, abs=1e-13)

    def test_hermite_product(self):
        nodes, weights = gauss_hermite_product(6, 3)
        assert nodes.shape == (216, 3)
        assert np.sum(weights) == pytest.approx(1.0, abs=1e-13)

    def test_sphere_area_and_moments(self):
        """Сумма весов 4 pi, интеграл x^2 по сфере 4 pi / 3"""
        directions, weights = sphere_rule(16, 32)
        assert np.sum(weights) == pytest.approx(4.0 * np.pi, rel=1e-13)
        assert np.sum(weights * directions[:, 0] ** 2) == pytest.approx(4.0 * np.pi / 3.0, rel=1e-12)
        assert np.linalg.norm(directions, axis=1) == pytest.approx(np.ones(len(weights)))


class TestCumulativeIntegral:
    """Тесты накопленного интеграла"""

    def test_fourth_order_on_smooth_data(self):
        """Поправка по концам даёт ошибку много меньше трапеции"""
        x = np.linspace(0.0, 1.0, 41)
        result = cumulative_integral(np.exp(x), x)
        assert np.max(np.abs(result - (np.exp(x) - 1.0))) < 1e-7

    def test_start_node(self):
        """Интеграл равен нулю в стартовом узле и знаковый левее него"""
        x = np.linspace(0.0, 2.0, 21)
        result = cumulative_integral(np.ones_like(x), x, start=10)
        assert result[10] == 0.0
        assert result[0] == pytest.approx(-1.0)
        assert result[-1] == pytest.approx(1.0)

    def test_axis(self):
        x = np.linspace(0.0, 1.0, 11)
        values = np.stack([x, 2 * x])
        result = cumulative_integral(values, x, axis=1)
        assert result[:, -1] == pytest.approx([0.5, 1.0])

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            cumulative_integral(np.zeros(3), np.linspace(0.0, 1.0, 4))

    @settings(deadline=None, max_examples=30)
    @given(st.integers(min_value=2, max_value=50))
    def test_trapezoid_weights_sum(self, count):
        """Сумма весов равна длине отрезка"""
        nodes = np.sort(np.linspace(-1.0, 3.0, count))
        assert np.sum(trapezoid_weights(nodes)) == pytest.approx(4.0)


class TestQuadratureSpec:
    """Тесты описания квадратуры"""

    def test_unknown_rule(self):
        with pytest.raises(DomainError):
            QuadratureSpec('simpson', (8,))

    def test_too_few_nodes(self):
        with pytest.raises(DomainError):
            QuadratureSpec('gauss-legendre', (1,))
