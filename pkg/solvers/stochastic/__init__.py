"""
Стохастические уравнения: винеровские траектории, аппроксимация Вонга-Закаи, факторизация потоков
"""

from .factorization import (FlowFactorization, FunctionalReport, PsiResult, commuting_flow_solution,
                            functional_S_check, inverse_noise_state, psi_fixed_point)
from .integrators import (ConvergenceStudy, ItoReport, SDEProblem, integrate_approx_ode, integrate_stratonovich,
                          ito_formula_check, wz_convergence_study)
from .wiener import SmoothedPath, SmoothingStudy, WienerPath, sample_wiener, smooth_path_ou, smoothing_study

__all__ = [
    'FlowFactorization', 'FunctionalReport', 'PsiResult', 'commuting_flow_solution', 'functional_S_check',
    'inverse_noise_state', 'psi_fixed_point',
    'ConvergenceStudy', 'ItoReport', 'SDEProblem', 'integrate_approx_ode', 'integrate_stratonovich',
    'ito_formula_check', 'wz_convergence_study',
    'SmoothedPath', 'SmoothingStudy', 'WienerPath', 'sample_wiener', 'smooth_path_ou', 'smoothing_study',
]
