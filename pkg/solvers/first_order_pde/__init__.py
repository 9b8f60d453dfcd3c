"""
Уравнения первого порядка: первые интегралы, характеристики, Клеро, Коши-Ковалевская
"""

from .cauchy_kowalevska import (CKSystem, MajorantEstimate, SeriesSolution2D, ck_majorant_radius,
                                ck_series_solve, poisson_ck_system, series_residual, state_symbols)
from .characteristics import (CharStrip, CompatibilityReport, HJProblem, HJResidual, hj_residual,
                              solve_nonlinear_hj, solve_quasilinear_hj, strip_at)
from .clairaut import ClairautCurve, solve_clairaut
from .integrals import FirstIntegralReport, verify_first_integral

__all__ = [
    'CKSystem', 'MajorantEstimate', 'SeriesSolution2D', 'ck_majorant_radius', 'ck_series_solve',
    'poisson_ck_system', 'series_residual', 'state_symbols',
    'CharStrip', 'CompatibilityReport', 'HJProblem', 'HJResidual', 'hj_residual',
    'solve_nonlinear_hj', 'solve_quasilinear_hj', 'strip_at',
    'ClairautCurve', 'solve_clairaut',
    'FirstIntegralReport', 'verify_first_integral',
]
