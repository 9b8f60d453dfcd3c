#!/usr/bin/env python3
"""
Тесты интеграторов Стратоновича и аппроксимации Вонга-Закаи
"""

import numpy as np
import pytest

from core.errors import DivergenceError, DomainError
from core.fields import FieldSpec
from core.grids import TimeGrid
from solvers.stochastic import (SDEProblem, integrate_approx_ode, integrate_stratonovich, ito_formula_check,
                                sample_wiener, smooth_path_ou, wz_convergence_study)

LINEAR = FieldSpec.linear([[1.0]], name="x")
ZERO = FieldSpec.constant([0.0])


def _geometric(x0: float = 1.0, T: float = 1.0) -> SDEProblem:
    """dx = x o dw: x = x0 exp(w)"""
    return SDEProblem(ZERO, (LINEAR,), [x0], T, exact=lambda t, x0, w: x0 * np.exp(w))


class TestSDEProblem:
    """Тесты описания уравнения"""

    def test_dimensions(self):
        with pytest.raises(DomainError):
            SDEProblem(FieldSpec.constant([0.0, 0.0]), (LINEAR,), [1.0], 1.0)

    def test_horizon(self):
        with pytest.raises(DomainError):
            SDEProblem(ZERO, (LINEAR,), [1.0], 0.0)

    def test_correction(self):
        """1/2 (dg) g = x / 2 для g = x"""
        np.testing.assert_allclose(_geometric().correction(0.0, np.array([3.0])), [1.5])


class TestStratonovich:
    """Тесты схем для формы Стратоновича"""

    @pytest.mark.parametrize("scheme, tol", [('heun', 0.02), ('euler', 0.2)])
    def test_geometric(self, seed, scheme, tol):
        path = sample_wiener(TimeGrid(0.0, 1.0, 2000), seed=seed)
        final = integrate_stratonovich(_geometric(), path, scheme).final
        exact = np.exp(path.values[-1])
        np.testing.assert_allclose(final, exact, rtol=tol)

    def test_deterministic_drift(self, seed):
        problem = SDEProblem(FieldSpec.constant([2.0]), (), [1.0], 1.0)
        table = integrate_stratonovich(problem, sample_wiener(TimeGrid(0.0, 1.0, 10), seed=seed), 'heun')
        np.testing.assert_allclose(table.states[:, 0], 1.0 + 2.0 * table.times)

    def test_divergence(self, seed):
        problem = SDEProblem(FieldSpec.autonomous(lambda y: y ** 2, 1), (), [1.0], 3.0)
        with np.errstate(over='ignore', invalid='ignore'):
            with pytest.raises(DivergenceError) as info:
                integrate_stratonovich(problem, sample_wiener(TimeGrid(0.0, 3.0, 300), seed=seed))
        assert info.value.last_time > 0.9

    def test_unknown_scheme(self, seed):
        with pytest.raises(DomainError):
            integrate_stratonovich(_geometric(), sample_wiener(TimeGrid(0.0, 1.0, 4), seed=seed), 'milstein')


class TestApproxOde:
    """Тесты случайных ОДУ со сглаженным шумом"""

    def test_geometric_closed_form(self, seed):
        """dx/dt = x dv/dt: x = x0 exp(v_eps)"""
        path = sample_wiener(TimeGrid(0.0, 1.0, 100), seed=seed)
        smoothed = smooth_path_ou(path, 0.05)
        table = integrate_approx_ode(_geometric(2.0), smoothed)
        np.testing.assert_allclose(table.states[:, 0], 2.0 * np.exp(smoothed.values[:, 0]), rtol=1e-4)
        assert table.diagnostics['eps'] == 0.05


class TestConvergenceStudy:
    """Тесты исследования сходимости Вонга-Закаи"""

    @pytest.mark.parametrize("eps_list", [[], [0.1, -0.05], [0.05, 0.1]])
    def test_invalid_eps(self, eps_list):
        with pytest.raises(DomainError):
            wz_convergence_study(_geometric(), eps_list, 10, 1)

    def test_two_paths_required(self):
        with pytest.raises(DomainError):
            wz_convergence_study(_geometric(), [0.1], 1, 1)

    def test_no_noise(self):
        problem = SDEProblem(FieldSpec.constant([1.0]), (), [0.0], 1.0)
        study = wz_convergence_study(problem, [0.1, 0.05], 4, 1)
        assert study.passed
        assert np.isnan(study.slope)
        assert all(row[1] < 1e-20 for row in study.rows)

    @pytest.mark.slow
    def test_linear_rate(self, seed):
        study = wz_convergence_study(_geometric(), [0.1, 0.05, 0.025], 200, seed)
        assert study.passed, f"Наклон {study.slope}"
        assert len(study.rows) == 3
        assert all(row[2] <= row[1] <= row[3] for row in study.rows)

    @pytest.mark.slow
    def test_geometric_rate_2000_paths(self, seed):
        """dx = x o dw на 2000 траекториях: наклон >= 0.8, ошибка убывает с eps"""
        study = wz_convergence_study(_geometric(), [0.1, 0.05, 0.025], 2000, seed)
        assert study.slope >= 0.8, f"Наклон {study.slope}"
        assert study.rows[-1][1] < study.rows[0][1]
        assert all(row[4] == 2000 for row in study.rows)


class TestItoFormula:
    """Тесты формулы замены переменных"""

    def test_square_of_geometric(self, seed):
        path = sample_wiener(TimeGrid(0.0, 1.0, 1000), seed=seed, n_paths=8)
        report = ito_formula_check(lambda t, x: x[..., 0] ** 2, _geometric(), path, tol=2e-2)
        assert report.passed, f"Разрыв {report.max_gap}"
        assert report.lhs.shape == (8,)

    def test_deterministic_exact(self, seed):
        problem = SDEProblem(FieldSpec.constant([1.0]), (), [0.5], 1.0)
        report = ito_formula_check(lambda t, x: t + x[..., 0], problem,
                                   sample_wiener(TimeGrid(0.0, 1.0, 20), seed=seed), tol=1e-9)
        assert report.passed
        assert float(report.lhs) == pytest.approx(2.5)
