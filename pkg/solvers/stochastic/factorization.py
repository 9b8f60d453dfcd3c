#!/usr/bin/env python3
"""
Факторизация стохастического потока для коммутирующих полей

dx = phi(lambda) f(x) dt + g(x) o dw, x(0) = lambda, при [g, f] = 0 даёт
x(t; lambda) = G(w(t)) o F(t phi(lambda))[lambda]. Обратное отображение
lambda = psi(t, x) = psi_hat(t, G(-w(t))[x]), где psi_hat - неподвижная
точка lambda = F(-t phi(lambda))[z].
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import DomainError, FixedPointError, HypothesisError
from core.fields import FieldSpec, numerical_gradient
from core.grids import TimeGrid, node_index
from core.quadrature import gauss_hermite
from core.tables import TrajectoryTable
from solvers.flows import DEFAULT_STEPS, commutation_test, flow
from solvers.stochastic.integrators import SDEProblem, Z95, integrate_stratonovich
from solvers.stochastic.wiener import WienerPath, sample_wiener

logger = logging.getLogger(__name__)

SAMPLE_POINTS = 256
RATIO_SLACK = 1e-6


@dataclass(frozen=True)
class FlowFactorization:
    """
    Поля f, g, скалярный вес phi и данные сжатия

    Args:
        f: Снос (автономный)
        g: Диффузия (автономная)
        phi: phi(lambda), lambda формы (..., d), результат формы (...)
        T: Горизонт
        sample_box: Брус для оценок супремумов и проверки коммутирования
        V: sup |d phi| (по умолчанию оценивается на брусе)
        K: sup |f| (по умолчанию оценивается на брусе)
        dphi: Градиент phi (по умолчанию центральные разности)
    """

    f: FieldSpec
    g: FieldSpec
    phi: Callable
    T: float
    sample_box: Tuple[Sequence[float], Sequence[float]]
    V: Optional[float] = None
    K: Optional[float] = None
    dphi: Optional[Callable] = None
    steps: int = DEFAULT_STEPS

    def __post_init__(self):
        if self.f.dim != self.g.dim:
            raise DomainError("Размерности полей f и g не совпадают")
        if not self.T > 0:
            raise DomainError(f"Горизонт должен быть положительным, получено {self.T}")
        lower, upper = (np.atleast_1d(np.asarray(b, dtype=float)) for b in self.sample_box)
        if lower.shape != (self.f.dim,) or upper.shape != (self.f.dim,) or np.any(upper < lower):
            raise DomainError("Брус выборки не согласован с размерностью полей")
        points = lower + (upper - lower) * np.random.default_rng(0).random((SAMPLE_POINTS, self.f.dim))
        points = np.concatenate([points, np.stack([lower, upper, 0.5 * (lower + upper)])])
        if self.V is None:
            object.__setattr__(self, 'V', float(np.max(np.linalg.norm(self.weight_gradient(points), axis=-1))))
        if self.K is None:
            object.__setattr__(self, 'K', float(np.max(np.linalg.norm(self.f(0.0, points), axis=-1))))

    @property
    def dim(self) -> int:
        return self.f.dim

    @property
    def rho(self) -> float:
        return self.T * self.V * self.K

    def weight(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        return np.broadcast_to(np.asarray(self.phi(lam), dtype=float), lam.shape[:-1])

    def weight_gradient(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        if self.dphi is not None:
            return np.broadcast_to(np.asarray(self.dphi(lam), dtype=float), lam.shape)
        return numerical_gradient(self.weight, lam)

    def drift_flow(self, theta, z) -> np.ndarray:
        return flow(self.f, theta, z, steps=self.steps)

    def noise_flow(self, sigma, z) -> np.ndarray:
        return flow(self.g, sigma, z, steps=self.steps)

    def sde_problem(self, lam) -> SDEProblem:
        """Уравнение dx = phi(lambda) f dt + g o dw, x(0) = lambda, для одного lambda"""
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        scale = float(self.weight(lam))
        f = self.f
        drift = FieldSpec(lambda t, y: scale * f(t, y), self.dim,
                          lambda t, y: scale * f.jac(t, y), name=f"{f.name}*phi")
        return SDEProblem(drift, (self.g,), lam, self.T)


@dataclass
class PsiResult:
    """
    Args:
        value: psi_hat(t, z)
        gaps: max по пакету |lambda_{k+1} - lambda_k|
        residual: max |F(t phi(lambda))[lambda] - z|
        within_radius: |lambda - z| <= r(T, z) / (1 - rho) во всех точках
        ratio_ok: Отношения соседних зазоров не превышают rho
    """

    value: np.ndarray
    gaps: List[float] = field(default_factory=list)
    residual: float = 0.0
    within_radius: bool = True
    ratio_ok: bool = True
    rho: float = 0.0

    @property
    def iterations(self) -> int:
        return len(self.gaps)

    @property
    def ratios(self) -> np.ndarray:
        gaps = np.asarray(self.gaps)
        if len(gaps) < 2:
            return np.empty(0)
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.where(gaps[:-1] > 0, gaps[1:] / gaps[:-1], 0.0)


def _require_contraction(fac: FlowFactorization):
    if fac.rho >= 1.0:
        raise HypothesisError(f"Условие сжатия нарушено: rho = T V K = {fac.rho:.3g} >= 1")


def psi_fixed_point(fac: FlowFactorization, t, z, tol: float = 1e-12, max_iter: int = 200) -> PsiResult:
    """
    lambda_0 = z, lambda_{k+1} = F(-t phi(lambda_k))[z]

    Raises:
        DomainError: t вне [0, T]
        HypothesisError: rho >= 1
        FixedPointError: Нет сходимости за max_iter шагов
    """
    _require_contraction(fac)
    z = np.asarray(z, dtype=float)
    times = np.broadcast_to(np.asarray(t, dtype=float), z.shape[:-1])
    if np.any(times < 0) or np.any(times > fac.T):
        raise DomainError(f"t должно лежать в [0, {fac.T}]")
    result = PsiResult(value=z.copy(), rho=fac.rho)
    lam = z
    for k in range(max_iter):
        following = fac.drift_flow(-times * fac.weight(lam), z)
        gap = float(np.max(np.abs(following - lam))) if following.size else 0.0
        lam = following
        result.gaps.append(gap)
        if len(result.gaps) >= 2 and result.gaps[-2] > tol:
            ratio = gap / result.gaps[-2]
            if ratio > fac.rho + RATIO_SLACK:
                result.ratio_ok = False
                logger.warning(f"Коэффициент сжатия {ratio:.3g} превышает rho = {fac.rho:.3g}")
        if gap <= tol:
            break
    else:
        raise FixedPointError(f"Неподвижная точка не найдена за {max_iter} итераций", last_gap=result.gaps[-1])

    result.value = lam
    forward = fac.drift_flow(times * fac.weight(lam), lam)
    result.residual = float(np.max(np.abs(forward - z))) if z.size else 0.0
    radius = fac.T * fac.K * np.abs(fac.weight(z)) / (1.0 - fac.rho)
    result.within_radius = bool(np.all(np.linalg.norm(lam - z, axis=-1) <= radius + 1e-9))
    logger.debug(f"psi: {result.iterations} итераций, невязка {result.residual:.3g}")
    return result


def _require_commuting(fac: FlowFactorization):
    report = commutation_test([fac.f, fac.g], fac.sample_box)
    if not report.passed:
        raise HypothesisError(f"Поля f и g не коммутируют: |[g, f]| = {report.worst_value:.3g} "
                              f"в точке {report.worst_point}")


def commuting_flow_solution(fac: FlowFactorization, path: WienerPath, lam) -> TrajectoryTable:
    """
    x(t_i; lambda) = G(w(t_i)) o F(t_i phi(lambda))[lambda] по узлам траектории

    Raises:
        HypothesisError: Поля не коммутируют
    """
    _require_commuting(fac)
    if path.m != 1:
        raise DomainError(f"Факторизация требует скалярного шума, получено m={path.m}")
    lam = np.asarray(lam, dtype=float)
    shape = (len(path.times),) + path.batch_shape + lam.shape[:-1] + (fac.dim,)
    points = np.broadcast_to(lam, shape)
    times = path.times.reshape((-1,) + (1,) * (len(shape) - 2))
    w = path.values[..., 0].reshape(path.values.shape[:-1] + (1,) * (lam.ndim - 1))
    inner = fac.drift_flow(times * fac.weight(points), points)
    states = fac.noise_flow(np.broadcast_to(w, shape[:-1]), inner)
    return TrajectoryTable(path.times, states, "commuting-flows", {'seed': path.seed})


def inverse_noise_state(fac: FlowFactorization, path: WienerPath, x) -> np.ndarray:
    """z_hat(t_i, x) = G(-w(t_i))[x] по узлам траектории"""
    x = np.asarray(x, dtype=float)
    shape = (len(path.times),) + path.batch_shape + (fac.dim,)
    return fac.noise_flow(-path.values[..., 0], np.broadcast_to(x, shape))


@dataclass(frozen=True)
class FunctionalReport:
    """
    Две оценки S(t, x) = E h(x_psi(T; t, x)) с 95% интервалами

    Args:
        direct: Монте-Карло по траекториям уравнения со сносом phi(psi(t, x)) f
        nested: Внешнее Монте-Карло по psi, внутреннее ожидание - Гаусс-Эрмит
        agree: Интервалы пересекаются
    """

    direct: float
    direct_ci: Tuple[float, float]
    nested: float
    nested_ci: Tuple[float, float]
    agree: bool
    n_paths: int
    seed: int


def _estimate(samples: np.ndarray) -> Tuple[float, Tuple[float, float]]:
    mean = float(np.mean(samples))
    half = Z95 * float(np.std(samples, ddof=1)) / np.sqrt(len(samples)) if len(samples) > 1 else 0.0
    return mean, (mean - half, mean + half)


def functional_S_check(fac: FlowFactorization, h: Callable, t: float, x, n_paths: int, seed: int,
                       n_steps: int = 200, inner_nodes: int = 24) -> FunctionalReport:
    """
    Прямая и вложенная оценки функционала S(t, x)

    psi(t, x) = psi_hat(t, G(-w(t))[x]) строится по той же траектории на [0, t];
    на [t, T] прямая оценка интегрирует уравнение методом Хойна, а вложенная
    берёт y = G(dW) o F((T - t) phi(lambda))[x] и ожидание по dW ~ N(0, T - t).

    Args:
        h: Функция h(x) -> (...)
        t: Момент, узел сетки TimeGrid(0, T, n_steps)
        x: Точка (d,)
    """
    _require_commuting(fac)
    grid = TimeGrid(0.0, fac.T, n_steps)
    start = node_index(grid.nodes, t)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    path = sample_wiener(grid, 1, seed, n_paths)

    z_hat = fac.noise_flow(-path.values[start, :, 0], np.broadcast_to(x, (n_paths, fac.dim)))
    lam = psi_fixed_point(fac, t, z_hat).value
    scale = fac.weight(lam)
    horizon = fac.T - grid.nodes[start]

    if start == len(grid.nodes) - 1:
        direct_samples = np.broadcast_to(np.asarray(h(x), dtype=float), (n_paths,))
    else:
        drift = FieldSpec(lambda s, y: scale[:, None] * fac.f(s, y), fac.dim, name="frozen-drift")
        problem = SDEProblem(drift, (fac.g,), x, fac.T)
        direct_samples = np.asarray(h(integrate_stratonovich(problem, path.restrict(start), 'heun').final))

    nodes, weights = gauss_hermite(inner_nodes)
    pushed = fac.drift_flow(horizon * scale, np.broadcast_to(x, (n_paths, fac.dim)))
    noise = np.sqrt(2.0 * horizon) * nodes
    shape = (n_paths, len(nodes), fac.dim)
    y = fac.noise_flow(np.broadcast_to(noise, shape[:-1]), np.broadcast_to(pushed[:, None, :], shape))
    nested_samples = np.asarray(h(y), dtype=float) @ weights

    direct, direct_ci = _estimate(np.asarray(direct_samples, dtype=float))
    nested, nested_ci = _estimate(nested_samples)
    agree = direct_ci[0] <= nested_ci[1] + 1e-12 and nested_ci[0] <= direct_ci[1] + 1e-12
    logger.info(f"S(t={t}): прямая {direct:.5g} [{direct_ci[0]:.5g}, {direct_ci[1]:.5g}], "
                f"вложенная {nested:.5g} [{nested_ci[0]:.5g}, {nested_ci[1]:.5g}]")
    return FunctionalReport(direct=direct, direct_ci=direct_ci, nested=nested, nested_ci=nested_ci,
                            agree=bool(agree), n_paths=int(n_paths), seed=int(seed))
