#!/usr/bin/env python3
"""
Тесты грамматики выражений
"""

import numpy as np
import pytest
import sympy as sp

from cli.expressions import (compile_derivative, compile_expression, parse_expression, point_function,
                             time_point_function)
from core.errors import ParseError


class TestParseExpression:
    """Тесты разбора выражений"""

    def test_power_with_caret(self):
        x = sp.Symbol('x')
        assert sp.simplify(parse_expression("x^2 + 1") - (x ** 2 + 1)) == 0

    def test_functions_and_pi(self):
        expr = parse_expression("sin(pi/2) + exp(0) + sqrt(4) + abs(-1)")
        assert float(expr) == pytest.approx(5.0)

    def test_restricted_variables(self):
        with pytest.raises(ParseError):
            parse_expression("x + y", ('x',))

    @pytest.mark.parametrize("text", [
        "", "   ", "sin(", "x +* 2", "foo(x)", "q + 1", "__import__('os')", "x.real", "x; y", "x == 1",
    ])
    def test_rejected(self, text):
        with pytest.raises(ParseError):
            parse_expression(text)


class TestCompiledFunctions:
    """Тесты числовых функций"""

    def test_constant_broadcasts(self):
        func = compile_expression("2", ('x',))
        values = func(np.zeros(5))
        assert values.shape == (5,)
        np.testing.assert_array_equal(values, 2.0)

    def test_argument_order(self):
        func = compile_expression("t - x", ('t', 'x'))
        assert float(func(3.0, 1.0)) == pytest.approx(2.0)

    def test_point_function(self):
        func = point_function("x*y + z", 3)
        points = np.array([[1.0, 2.0, 3.0], [0.5, 0.5, 0.0]])
        np.testing.assert_allclose(func(points), [5.0, 0.25])

    def test_time_point_function(self):
        func = time_point_function("t*x", 1)
        np.testing.assert_allclose(func(2.0, np.array([[1.0], [3.0]])), [2.0, 6.0])

    def test_derivative(self):
        """Производные -p^2 + x u: по p, по x, по u"""
        names = ('t', 'x', 'u', 'p')
        args = (0.0, np.array([1.0, 2.0]), np.array([3.0, 4.0]), np.array([0.5, -1.0]))
        np.testing.assert_allclose(compile_derivative("-p^2 + x*u", names, 'p')(*args), [-1.0, 2.0])
        np.testing.assert_allclose(compile_derivative("-p^2 + x*u", names, 'x')(*args), [3.0, 4.0])
        np.testing.assert_allclose(compile_derivative("-p^2 + x*u", names, 'u')(*args), [1.0, 2.0])

    def test_derivative_of_abs(self):
        func = compile_derivative("abs(p)", ('p',), 'p')
        np.testing.assert_allclose(func(np.array([-2.0, 3.0])), [-1.0, 1.0])

    def test_derivative_constant_broadcasts(self):
        func = compile_derivative("t + x", ('t', 'x'), 'x')
        np.testing.assert_array_equal(func(0.0, np.zeros(4)), np.ones(4))

    def test_derivative_unknown_variable(self):
        with pytest.raises(ParseError):
            compile_derivative("x", ('x',), 'p')
