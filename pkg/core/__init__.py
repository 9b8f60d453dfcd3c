#!/usr/bin/env python3
"""
Core модуль - сетки, поля, таблицы, квадратуры и общие компоненты решателей
"""

from .errors import (CausticError, DivergenceError, DomainError, FixedPointError, HypothesisError, IntegrityError,
                     NonConvergenceError, NumericError, OrderLimitError, ParseError, SolverError, StripError,
                     UnsupportedError)
from .fields import FieldSpec
from .grids import SpaceGrid, TimeGrid
from .quadrature import QuadratureSpec
from .tables import SolutionTable, TrajectoryTable

__all__ = [
    'CausticError', 'DivergenceError', 'DomainError', 'FixedPointError', 'HypothesisError', 'IntegrityError',
    'NonConvergenceError', 'NumericError', 'OrderLimitError', 'ParseError', 'SolverError', 'StripError',
    'UnsupportedError',
    'FieldSpec', 'SpaceGrid', 'TimeGrid', 'QuadratureSpec', 'SolutionTable', 'TrajectoryTable',
]
