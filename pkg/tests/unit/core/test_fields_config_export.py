#!/usr/bin/env python3
"""
Тесты полей, конфигурации и записи CSV
"""

import csv
import json

import numpy as np
import pytest

from core.config import get_setting, load_config
from core.export import format_value, write_csv
from core.fields import FieldSpec, central_difference_jacobian, numerical_gradient


class TestFieldSpec:
    """Тесты правых частей"""

    def test_broadcast_constant(self):
        """Постоянное поле приводится к форме пакета"""
        field = FieldSpec.constant([1.0, 2.0])
        values = field(0.0, np.zeros((5, 2)))
        assert values.shape == (5, 2)
        assert values[3] == pytest.approx([1.0, 2.0])

    def test_linear_jacobian(self, rotation_field):
        jac = rotation_field.jac(0.0, np.ones((3, 2)))
        assert jac.shape == (3, 2, 2)
        assert jac[0] == pytest.approx(np.array([[0.0, -1.0], [1.0, 0.0]]))

    def test_numerical_jacobian_matches_analytic(self):
        """Разностная матрица Якоби совпадает с аналитической"""
        field = FieldSpec.autonomous(lambda y: np.stack([y[..., 0] * y[..., 1], np.sin(y[..., 0])], axis=-1), 2)
        y = np.array([0.3, -1.2])
        expected = np.array([[y[1], y[0]], [np.cos(y[0]), 0.0]])
        assert np.max(np.abs(field.jac(0.0, y) - expected)) < 1e-9

    def test_gradient_of_scalar(self):
        y = np.array([[1.0, 2.0], [0.5, -1.0]])
        gradient = numerical_gradient(lambda z: np.sum(z ** 2, axis=-1), y)
        assert gradient.shape == (2, 2)
        assert np.max(np.abs(gradient - 2.0 * y)) < 1e-9

    def test_jacobian_shape_of_vector_map(self):
        jac = central_difference_jacobian(lambda z: z[..., ::-1], np.zeros((4, 3)))
        assert jac.shape == (4, 3, 3)


class TestConfig:
    """Тесты конфигурации"""

    def test_defaults(self):
        config = load_config()
        assert get_setting(config, 'output', 'directory') is not None
        assert get_setting(config, 'missing', 'key', 7) == 7

    def test_environment_override(self, tmp_path, monkeypatch):
        """Переменные окружения приоритетнее файла"""
        path = tmp_path / "config.json"
        path.write_text(json.dumps({'logging': {'level': 'INFO'}, 'random': {'seed': 1}}), encoding='utf-8')
        monkeypatch.setenv('SOLVERS_SEED', '99')
        monkeypatch.setenv('SOLVERS_LOG_LEVEL', 'debug')
        config = load_config(str(path))
        assert config['random']['seed'] == 99
        assert config['logging']['level'] == 'DEBUG'

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_config(str(tmp_path / "absent.json"))

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text("{not json", encoding='utf-8')
        with pytest.raises(json.JSONDecodeError):
            load_config(str(path))


class TestExport:
    """Тесты записи CSV"""

    def test_format(self):
        assert format_value(0.1) == "0.10000000000000001"
        assert format_value(3) == "3"
        assert format_value(True) == "True"
        assert format_value("abc") == "abc"
        assert format_value(np.float64(2.5)) == "2.5"

    def test_write_csv(self, output_dir):
        path = write_csv(output_dir / "nested" / "table.csv", ['t', 'y'], [[0.0, 1.0], [0.5, 2.0]])
        with open(path, encoding='utf-8') as f:
            rows = list(csv.reader(f))
        assert rows[0] == ['t', 'y']
        assert rows[2] == ['0.5', '2']
