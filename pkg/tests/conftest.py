#!/usr/bin/env python3
"""
Общие фикстуры тестов: поля, сетки, зёрна, файлы задач
"""

import textwrap

import pytest

from core.fields import FieldSpec
from core.grids import SpaceGrid, TimeGrid

SEED = 20240917


@pytest.fixture
def seed():
    """Фиксированное зерно для статистических тестов"""
    return SEED


@pytest.fixture
def rotation_field():
    """Поворот y' = J y, J = [[0, -1], [1, 0]]"""
    return FieldSpec.linear([[0.0, -1.0], [1.0, 0.0]], name="rotation")


@pytest.fixture
def unit_grid():
    """Сетка [0, 1] на 100 интервалов"""
    return TimeGrid(0.0, 1.0, 100)


@pytest.fixture
def square_grid():
    """Квадрат [-1, 1]^2 на 20 x 20 интервалов"""
    return SpaceGrid((-1.0, -1.0), (1.0, 1.0), (20, 20))


@pytest.fixture
def output_dir(tmp_path):
    """Временный каталог вывода"""
    directory = tmp_path / "output"
    directory.mkdir()
    return directory


@pytest.fixture
def problem_writer(tmp_path):
    """Запись файла задачи из текста INI"""

    def write(name: str, text: str):
        path = tmp_path / f"{name}.ini"
        path.write_text(textwrap.dedent(text).lstrip(), encoding='utf-8')
        return path

    return write
