#!/usr/bin/env python3
"""
Грамматика выражений файлов задач

Числа, + - * / ^, скобки, функции sin cos exp sqrt abs tanh log,
константа pi и переменные t x y z u p.
"""

import logging
import re
from typing import Callable, Dict, Sequence

import numpy as np
import sympy as sp
from sympy.core.function import AppliedUndef
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from core.errors import ParseError

logger = logging.getLogger(__name__)

VARIABLES = ('t', 'x', 'y', 'z', 'u', 'p')
FUNCTIONS: Dict[str, Callable] = {
    'sin': sp.sin, 'cos': sp.cos, 'exp': sp.exp, 'sqrt': sp.sqrt,
    'abs': sp.Abs, 'tanh': sp.tanh, 'log': sp.log,
}
TRANSFORMATIONS = standard_transformations + (convert_xor,)
_GLOBALS = {'Symbol': sp.Symbol, 'Integer': sp.Integer, 'Float': sp.Float, 'Rational': sp.Rational,
            'Function': sp.Function, '__builtins__': {}}
_ALLOWED_TEXT = re.compile(r"^[0-9A-Za-z_+\-*/^().,\s]+$")
_ATTRIBUTE = re.compile(r"[A-Za-z_)\]]\s*\.")


def parse_expression(text: str, variables: Sequence[str] = VARIABLES) -> sp.Expr:
    """
    Разбор выражения в sympy с ограниченным пространством имён

    Raises:
        ParseError: Синтаксическая ошибка, неизвестное имя или функция
    """
    if not isinstance(text, str) or not text.strip():
        raise ParseError("Пустое выражение")
    if not _ALLOWED_TEXT.match(text) or '__' in text or _ATTRIBUTE.search(text):
        raise ParseError(f"Недопустимые символы в выражении '{text}'")
    local = {name: sp.Symbol(name) for name in variables}
    local.update(FUNCTIONS)
    local['pi'] = sp.pi
    try:
        expr = parse_expr(text, local_dict=local, global_dict=dict(_GLOBALS), transformations=TRANSFORMATIONS)
    except Exception as e:
        raise ParseError(f"Не удалось разобрать выражение '{text}': {e}") from e
    if not isinstance(expr, sp.Expr):
        raise ParseError(f"Выражение '{text}' не является числовым")
    unknown = sorted(s.name for s in expr.free_symbols if s.name not in variables)
    if unknown:
        raise ParseError(f"Неизвестные переменные в '{text}': {', '.join(unknown)}")
    undefined = sorted(str(f.func) for f in expr.atoms(AppliedUndef))
    if undefined:
        raise ParseError(f"Неизвестные функции в '{text}': {', '.join(undefined)}")
    return expr


def _compile(expr: sp.Expr, variables: Sequence[str]) -> Callable:
    symbols = [sp.Symbol(name) for name in variables]
    func = sp.lambdify(symbols, expr, modules='numpy')

    def evaluate(*args):
        arrays = [np.asarray(a, dtype=float) for a in args]
        shape = np.broadcast_shapes(*(a.shape for a in arrays)) if arrays else ()
        return np.broadcast_to(np.asarray(func(*arrays), dtype=float), shape)

    return evaluate


def compile_expression(text: str, variables: Sequence[str]) -> Callable:
    """
    Числовая функция от переменных в заданном порядке

    Результат приводится к общей форме аргументов, так что постоянные
    выражения тоже возвращают массивы.
    """
    return _compile(parse_expression(text, variables), variables)


def compile_derivative(text: str, variables: Sequence[str], wrt: str) -> Callable:
    """Символьная производная выражения по переменной wrt как числовая функция"""
    if wrt not in variables:
        raise ParseError(f"Переменная '{wrt}' не входит в {', '.join(variables)}")
    real = {sp.Symbol(name): sp.Symbol(name, real=True) for name in variables}
    expr = parse_expression(text, variables).xreplace(real)
    derivative = sp.diff(expr, real[sp.Symbol(wrt)])
    return _compile(derivative.xreplace({v: k for k, v in real.items()}), variables)


def point_function(text: str, dim: int) -> Callable:
    """Функция точки формы (..., dim) с координатами x, y, z"""
    names = ('x', 'y', 'z')[:dim]
    func = compile_expression(text, names)

    def evaluate(points):
        points = np.asarray(points, dtype=float)
        return func(*(points[..., i] for i in range(dim)))

    return evaluate


def time_point_function(text: str, dim: int) -> Callable:
    """Функция f(t, x) с точкой x формы (..., dim)"""
    names = ('x', 'y', 'z')[:dim]
    func = compile_expression(text, ('t',) + tuple(names))

    def evaluate(t, points):
        points = np.asarray(points, dtype=float)
        return func(t, *(points[..., i] for i in range(dim)))

    return evaluate
