#!/usr/bin/env python3
"""
Тесты винеровских траекторий и сглаживания
"""

import numpy as np
import pytest

from core.errors import DomainError
from core.grids import TimeGrid
from solvers.stochastic import sample_wiener, smooth_path_ou, smoothing_study

GRID = TimeGrid(0.0, 1.0, 200)


class TestSampleWiener:
    """Тесты выборки траекторий"""

    def test_shapes(self, seed):
        path = sample_wiener(GRID, m=2, seed=seed)
        assert path.increments.shape == (200, 2)
        assert path.values.shape == (201, 2)
        assert path.m == 2
        np.testing.assert_array_equal(path.values[0], 0.0)
        np.testing.assert_allclose(path.values[-1], np.sum(path.increments, axis=0))

    def test_reproducible(self, seed):
        first = sample_wiener(GRID, seed=seed)
        second = sample_wiener(GRID, seed=seed)
        np.testing.assert_array_equal(first.values, second.values)
        assert first.seed == seed

    def test_batch_independent_of_size(self, seed):
        """Траектория i пакета не зависит от размера пакета"""
        single = sample_wiener(GRID, seed=seed)
        small = sample_wiener(GRID, seed=seed, n_paths=3)
        large = sample_wiener(GRID, seed=seed, n_paths=10)
        assert small.batch_shape == (3,)
        np.testing.assert_array_equal(single.values, small.values[:, 0])
        np.testing.assert_array_equal(small.values, large.values[:, :3])

    def test_entropy_seed_recorded(self):
        path = sample_wiener(GRID)
        assert isinstance(path.seed, int)

    def test_restrict(self, seed):
        path = sample_wiener(GRID, seed=seed)
        tail = path.restrict(50)
        assert tail.times[0] == pytest.approx(0.25)
        np.testing.assert_array_equal(tail.values[0], 0.0)
        np.testing.assert_allclose(tail.values[-1], path.values[-1] - path.values[50])

    @pytest.mark.parametrize("m, n_paths", [(0, None), (1, 0)])
    def test_invalid(self, m, n_paths):
        with pytest.raises(DomainError):
            sample_wiener(GRID, m=m, seed=1, n_paths=n_paths)

    def test_variance(self, seed):
        path = sample_wiener(GRID, seed=seed, n_paths=4000)
        assert np.var(path.values[-1, :, 0]) == pytest.approx(1.0, abs=0.1)


class TestSmoothing:
    """Тесты фильтра Орнштейна-Уленбека"""

    def test_starts_at_zero(self, seed):
        smoothed = smooth_path_ou(sample_wiener(GRID, seed=seed), 0.05)
        np.testing.assert_array_equal(smoothed.values[0], 0.0)
        np.testing.assert_allclose(smoothed.residual, smoothed.source.values - smoothed.values)

    def test_velocity_at_nodes(self, seed):
        """dv/dt = (w - v) / eps в узлах"""
        smoothed = smooth_path_ou(sample_wiener(GRID, seed=seed), 0.05)
        for i in (0, 17, 120):
            expected = (smoothed.source.values[i] - smoothed.values[i]) / 0.05
            np.testing.assert_allclose(smoothed.velocity(GRID.nodes[i]), expected, atol=1e-9)

    def test_linear_path(self):
        """w(t) = t: v = t - eps (1 - exp(-t / eps))"""
        times = np.linspace(0.0, 1.0, 11)
        path = sample_wiener(times, seed=3)
        linear = type(path)(times, np.diff(times)[:, None], times[:, None], 3)
        smoothed = smooth_path_ou(linear, 0.1)
        expected = times - 0.1 * (1.0 - np.exp(-times / 0.1))
        np.testing.assert_allclose(smoothed.values[:, 0], expected, atol=1e-12)

    def test_eps_positive(self, seed):
        with pytest.raises(DomainError):
            smooth_path_ou(sample_wiener(GRID, seed=seed), 0.0)

    @pytest.mark.slow
    def test_mean_square_rate(self, seed):
        """E |v_eps - w|^2 ~ eps / 2"""
        study = smoothing_study(TimeGrid(0.0, 1.0, 1000), [0.04, 0.02, 0.01], 400, seed)
        assert study.slope == pytest.approx(1.0, abs=0.3)
        assert study.table.values.shape == (3, 1001)

    @pytest.mark.slow
    def test_mean_square_bound(self, seed):
        """E |v_eps(t) - w(t)|^2 <= 1.1 eps при t = 0.5 и t = 1 на 10^4 траекториях"""
        eps_list = [0.1, 0.05, 0.02]
        study = smoothing_study(TimeGrid(0.0, 1.0, 500), eps_list, 10_000, seed)
        times = study.table.axes[1]
        for column in (int(np.argmin(np.abs(times - 0.5))), len(times) - 1):
            for row, eps in enumerate(eps_list):
                mse = study.table.values[row, column]
                assert mse <= 1.1 * eps, f"eps={eps}, t={times[column]}: {mse:.4g}"
