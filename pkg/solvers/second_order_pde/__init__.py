"""
Уравнения второго порядка: потенциалы, волны, теплопроводность, ряды Фурье, метод Римана
"""

from .ball import BallProblem, ball_dirichlet_solve, ball_neumann_recover, normal_derivative, poisson_kernel_mass
from .fourier import FourierSolution, MixedBVP, fourier_hyperbolic_solve, fourier_parabolic_solve
from .heat import heat_kernel_mass, heat_solve
from .max_principle import MaxPrincipleReport, max_principle_check, spd_sqrt
from .nonlinear import (EllipticResult, ParabolicBounds, PicardReport, nonlinear_elliptic_picard,
                        nonlinear_parabolic_picard, parabolic_gap_bound)
from .potential import PotentialReport, newtonian_potential, potential_values
from .riemann import RiemannKernel, RiemannProblem, riemann_cauchy_solve, riemann_function, riemann_goursat_solve
from .variational import ELResidual, Lagrangian, euler_lagrange_residual
from .waves import (WaveProblem, dalembert_solve, duhamel_solve, energy_1d, evaluator, kirchhoff_solve,
                    observed_order, wave2d_poisson_solve, wave_residual)

__all__ = [
    'BallProblem', 'ball_dirichlet_solve', 'ball_neumann_recover', 'normal_derivative', 'poisson_kernel_mass',
    'FourierSolution', 'MixedBVP', 'fourier_hyperbolic_solve', 'fourier_parabolic_solve',
    'heat_kernel_mass', 'heat_solve',
    'MaxPrincipleReport', 'max_principle_check', 'spd_sqrt',
    'EllipticResult', 'ParabolicBounds', 'PicardReport', 'nonlinear_elliptic_picard',
    'nonlinear_parabolic_picard', 'parabolic_gap_bound',
    'PotentialReport', 'newtonian_potential', 'potential_values',
    'RiemannKernel', 'RiemannProblem', 'riemann_cauchy_solve', 'riemann_function', 'riemann_goursat_solve',
    'ELResidual', 'Lagrangian', 'euler_lagrange_residual',
    'WaveProblem', 'dalembert_solve', 'duhamel_solve', 'energy_1d', 'evaluator', 'kirchhoff_solve',
    'observed_order', 'wave2d_poisson_solve', 'wave_residual',
]
