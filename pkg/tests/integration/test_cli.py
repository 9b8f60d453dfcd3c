#!/usr/bin/env python3
"""
Интеграционные тесты пакетного запуска
"""

import csv

import pytest

from cli.main import EXIT_OK, EXIT_PARSE, EXIT_SOLVER, main, run


def read_report(path):
    with open(path, newline='', encoding='utf-8') as f:
        return {row['check']: row for row in csv.DictReader(f)}


@pytest.fixture
def settings(output_dir):
    return {'output': {'directory': str(output_dir)}, 'random': {'seed': 1}}


HEAT = """
    [problem]
    kind = heat

    [parameters]
    phi = cos(x)

    [grid]
    x_lower = -pi
    x_upper = pi
    nx = 10
    times = 0.5, 1
    """

CAUSTIC = """
    [problem]
    kind = hj-nonlinear

    [parameters]
    H = -p^2
    u0 = cos(x)

    [grid]
    x_lower = 2
    x_upper = 4.5
    nx = 16
    t1 = 1
    nt = 20
    """


class TestRun:
    """Тесты команды run"""

    def test_heat_writes_table_and_report(self, problem_writer, output_dir, settings):
        summary = run('solve', problem_writer("heat_cos", HEAT), out=str(output_dir), config=settings)
        assert summary.exit_status == EXIT_OK
        assert (output_dir / "heat_cos.csv").exists()
        report = read_report(output_dir / "heat_cos_report.csv")
        assert 'wall_time' in report
        with open(output_dir / "heat_cos.csv", newline='', encoding='utf-8') as f:
            rows = list(csv.reader(f))
        assert rows[0] == ['t', 'x', 'value']
        assert len(rows) == 1 + 2 * 11

    def test_output_directory_from_config(self, problem_writer, output_dir, settings):
        summary = run('solve', problem_writer("heat_cfg", HEAT), config=settings)
        assert summary.exit_status == EXIT_OK
        assert (output_dir / "heat_cfg.csv").exists()

    def test_parse_error(self, problem_writer, output_dir, settings):
        path = problem_writer("broken", "[problem]\nkind = heat\n[parameters]\nphi = sin(\n"
                                        "[grid]\nx_lower = 0\nx_upper = 1\nnx = 4\ntimes = 1\n")
        summary = run('solve', path, out=str(output_dir), config=settings)
        assert summary.exit_status == EXIT_PARSE
        assert not list(output_dir.iterdir())

    def test_unknown_kind(self, problem_writer, output_dir, settings):
        summary = run('solve', problem_writer("plasma", "[problem]\nkind = plasma\n"),
                      out=str(output_dir), config=settings)
        assert summary.exit_status == EXIT_PARSE

    def test_empty_list(self, problem_writer, output_dir, settings):
        text = "[problem]\nkind = wong-zakai\n[parameters]\nf = 0\ng = x\neps =\n"
        summary = run('converge', problem_writer("empty", text), out=str(output_dir), config=settings)
        assert summary.exit_status == EXIT_PARSE

    def test_missing_file(self, tmp_path, output_dir, settings):
        summary = run('solve', tmp_path / "absent.ini", out=str(output_dir), config=settings)
        assert summary.exit_status == EXIT_PARSE

    def test_caustic_reported(self, problem_writer, output_dir, settings):
        summary = run('solve', problem_writer("caustic", CAUSTIC), out=str(output_dir), config=settings)
        assert summary.exit_status == EXIT_SOLVER
        assert not (output_dir / "caustic.csv").exists()
        report = read_report(output_dir / "caustic_report.csv")
        assert 0.4 <= float(report['caustic_t']['value']) <= 0.6
        assert report['error']['passed'] == 'False'

    def test_heat_kernel_verified(self, problem_writer, output_dir, settings):
        text = "[problem]\nkind = heat-kernel\n[grid]\ntimes = 0.01, 0.1, 1, 10\n"
        summary = run('verify', problem_writer("kernel", text), out=str(output_dir), config=settings)
        assert summary.exit_status == EXIT_OK
        assert all(check.passed for check in summary.checks)

    def test_max_principle_violation(self, problem_writer, output_dir, settings):
        text = """
            [problem]
            kind = max-principle

            [parameters]
            equation = harmonic
            u = -(x^2 + y^2)

            [grid]
            x_lower = -1, -1
            x_upper = 1, 1
            nx = 10, 10
            """
        summary = run('verify', problem_writer("bowl", text), out=str(output_dir), config=settings)
        assert summary.exit_status == EXIT_SOLVER
        report = read_report(output_dir / "bowl_report.csv")
        assert report['max_principle']['passed'] == 'False'
        assert float(report['witness_1']['value']) == pytest.approx(0.0)
        assert float(report['witness_2']['value']) == pytest.approx(0.0)

    def test_seed_from_argument_is_reproducible(self, problem_writer, output_dir, settings):
        text = """
            [problem]
            kind = wong-zakai

            [parameters]
            f = 0
            g = x
            exact = x*exp(y)
            eps = 0.2, 0.1
            n_paths = 20
            """
        path = problem_writer("wz", text)
        first = run('converge', path, out=str(output_dir / "a"), seed=5, config=settings)
        second = run('converge', path, out=str(output_dir / "b"), seed=5, config=settings)
        assert (output_dir / "a" / "wz.csv").read_text() == (output_dir / "b" / "wz.csv").read_text()
        assert first.exit_status == second.exit_status


class TestMain:
    """Тесты точки входа"""

    def test_main_returns_status(self, problem_writer, output_dir):
        path = problem_writer("heat_main", HEAT)
        assert main(['solve', str(path), '--out', str(output_dir), '--seed', '3']) == EXIT_OK
        assert (output_dir / "heat_main.csv").exists()

    def test_invalid_verb(self):
        with pytest.raises(SystemExit):
            main(['simulate', 'problem.ini'])
