#!/usr/bin/env python3
"""
Тесты сеток и таблиц решений
"""

import numpy as np
import pytest

from core.errors import DomainError
from core.grids import SpaceGrid, TimeGrid, as_nodes, node_index
from core.tables import SolutionTable, TrajectoryTable


class TestTimeGrid:
    """Тесты равномерной сетки по времени"""

    def test_nodes_and_step(self):
        """Узлы включают оба конца, шаг (t1 - t0) / n"""
        grid = TimeGrid(0.0, 2.0, 4)
        assert grid.h == pytest.approx(0.5)
        assert list(grid.nodes) == pytest.approx([0.0, 0.5, 1.0, 1.5, 2.0])

    def test_index_of(self):
        """Индекс узла находится, не узел даёт None"""
        grid = TimeGrid(0.0, 1.0, 10)
        assert grid.index_of(0.3) == 3
        assert grid.index_of(0.35) is None

    def test_refine(self):
        """Измельчение умножает число интервалов"""
        assert TimeGrid(0.0, 1.0, 10).refine(4).n == 40

    @pytest.mark.parametrize("t0, t1, n", [(1.0, 1.0, 10), (0.0, 1.0, 0), (0.0, float('inf'), 10)])
    def test_invalid_grid(self, t0, t1, n):
        """Вырожденные сетки отклоняются"""
        with pytest.raises(DomainError):
            TimeGrid(t0, t1, n)


class TestSpaceGrid:
    """Тесты прямоугольной сетки"""

    def test_points_shape(self, square_grid):
        """points() имеет форму shape + (dim,)"""
        points = square_grid.points()
        assert points.shape == (21, 21, 2), f"Форма {points.shape}"
        assert points[0, 0] == pytest.approx([-1.0, -1.0])
        assert points[-1, -1] == pytest.approx([1.0, 1.0])

    def test_interval(self):
        """Одномерная сетка"""
        grid = SpaceGrid.interval(0.0, 1.0, 5)
        assert grid.dim == 1
        assert grid.spacing == pytest.approx((0.2,))

    def test_mismatched_dimensions(self):
        """Разные длины границ и чисел интервалов"""
        with pytest.raises(DomainError):
            SpaceGrid((0.0, 0.0), (1.0,), (4, 4))


class TestNodes:
    """Тесты вспомогательных функций узлов"""

    def test_as_nodes_rejects_unsorted(self):
        with pytest.raises(DomainError):
            as_nodes([0.0, 0.5, 0.2])

    def test_single_node(self):
        """Один узел допустим"""
        assert list(as_nodes([1.5])) == [1.5]

    def test_node_index(self):
        assert node_index([0.0, 0.5, 1.0], 0.5) == 1
        with pytest.raises(DomainError):
            node_index([0.0, 0.5, 1.0], 0.7)


class TestTables:
    """Тесты таблиц"""

    def test_trajectory_rows(self):
        """Строки траектории: время и компоненты"""
        table = TrajectoryTable(np.array([0.0, 1.0]), np.array([[1.0, 2.0], [3.0, 4.0]]), "test")
        assert table.header() == ['t', 'y1', 'y2']
        assert table.to_rows() == [[0.0, 1.0, 2.0], [1.0, 3.0, 4.0]]
        assert list(table.final) == [3.0, 4.0]

    def test_trajectory_is_read_only(self):
        table = TrajectoryTable(np.array([0.0, 1.0]), np.zeros((2, 1)), "test")
        with pytest.raises(ValueError):
            table.states[0, 0] = 1.0

    def test_solution_rows_respect_mask(self):
        """Узлы вне маски не попадают в строки"""
        axes = (np.array([0.0, 1.0]), np.array([0.0, 1.0, 2.0]))
        values = np.arange(6.0).reshape(2, 3)
        mask = np.array([[True, False, True], [False, True, True]])
        table = SolutionTable(axes, ('x', 'y'), values, "test", mask=mask)
        rows = table.to_rows()
        assert len(rows) == 4
        assert rows[1] == [0.0, 2.0, 2.0]
        assert table.header() == ['x', 'y', 'value']

    def test_solution_shape_mismatch(self):
        with pytest.raises(ValueError):
            SolutionTable((np.zeros(3),), ('x',), np.zeros(4), "test")
