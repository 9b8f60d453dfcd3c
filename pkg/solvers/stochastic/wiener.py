#!/usr/bin/env python3
"""
Винеровские траектории и их сглаживание фильтром Орнштейна-Уленбека
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from core.errors import DomainError
from core.grids import as_nodes
from core.tables import SolutionTable

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WienerPath:
    """
    Траектория m-мерного винеровского процесса на узлах

    Args:
        times: Узлы (N + 1,)
        increments: Приращения формы (N, *batch, m)
        values: w(t_i) формы (N + 1, *batch, m), w(t_0) = 0
        seed: Зерно генератора
    """

    times: np.ndarray
    increments: np.ndarray
    values: np.ndarray
    seed: int

    @property
    def m(self) -> int:
        return self.values.shape[-1]

    @property
    def batch_shape(self):
        return self.values.shape[1:-1]

    def restrict(self, start: int) -> 'WienerPath':
        """Приращения после узла start; значения отсчитываются от w(t_start)"""
        values = self.values[start:] - self.values[start]
        return WienerPath(self.times[start:], self.increments[start:], values, self.seed)


def _path_generators(seed: int, count: int):
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(count)]


def sample_wiener(grid, m: int = 1, seed: Optional[int] = None, n_paths: Optional[int] = None) -> WienerPath:
    """
    Приращения N(0, h_i), независимые по узлам и компонентам

    Траектория i пакета берёт свой генератор из SeedSequence(seed).spawn,
    поэтому не зависит от размера пакета; одиночная траектория совпадает
    с нулевой траекторией пакета.

    Args:
        grid: TimeGrid или возрастающая последовательность узлов
        m: Размерность процесса
        seed: Зерно (None - энтропия ОС, записывается в результат)
        n_paths: Размер пакета или None для одной траектории
    """
    if m < 1:
        raise DomainError(f"Размерность процесса должна быть >= 1, получено {m}")
    if n_paths is not None and n_paths < 1:
        raise DomainError(f"Число траекторий должно быть >= 1, получено {n_paths}")
    nodes = as_nodes(grid)
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % (2 ** 63))
    steps = np.sqrt(np.diff(nodes))
    count = 1 if n_paths is None else n_paths
    draws = np.stack([rng.standard_normal((len(steps), m)) for rng in _path_generators(seed, count)], axis=1)
    increments = draws * steps[:, None, None]
    if n_paths is None:
        increments = increments[:, 0]
    zero = np.zeros((1,) + increments.shape[1:])
    values = np.concatenate([zero, np.cumsum(increments, axis=0)], axis=0)
    logger.debug(f"Винеровская траектория: {len(nodes)} узлов, m={m}, пакет {count}, зерно {seed}")
    return WienerPath(times=nodes, increments=increments, values=values, seed=int(seed))


@dataclass(frozen=True)
class SmoothedPath:
    """
    Сглаженная траектория v_eps и остаток eta_eps = w - v_eps

    Между узлами w линейна, v_eps известна в замкнутом виде, поэтому
    скорость dv/dt доступна в любой момент.
    """

    source: WienerPath
    eps: float
    values: np.ndarray
    residual: np.ndarray

    @property
    def beta(self) -> float:
        return 1.0 / self.eps

    def velocity(self, t: float) -> np.ndarray:
        """dv/dt = beta (w(t) - v(t)) для t в пределах сетки"""
        times = self.source.times
        if len(times) < 2:
            return np.zeros(self.values.shape[1:])
        i = int(np.clip(np.searchsorted(times, t, side='right') - 1, 0, len(times) - 2))
        tau = t - times[i]
        slope = self.source.increments[i] / (times[i + 1] - times[i])
        gap = self.values[i] - self.source.values[i]
        return slope - (self.beta * gap + slope) * np.exp(-self.beta * tau)


def smooth_path_ou(path: WienerPath, eps: float) -> SmoothedPath:
    """
    dv/dt = (w - v) / eps, v(0) = 0, точное интегрирование на кусочно-линейной w

    v_{i+1} = w_{i+1} + (v_i - w_i + eps d_i) exp(-h_i / eps) - eps d_i,  d_i = dw_i / h_i
    """
    if not eps > 0:
        raise DomainError(f"eps должно быть положительным, получено {eps}")
    times = path.times
    v = np.zeros_like(path.values)
    for i in range(len(times) - 1):
        h = times[i + 1] - times[i]
        slope = path.increments[i] / h
        decay = np.exp(-h / eps)
        v[i + 1] = path.values[i + 1] + (v[i] - path.values[i] + eps * slope) * decay - eps * slope
    return SmoothedPath(source=path, eps=float(eps), values=v, residual=path.values - v)


@dataclass(frozen=True)
class SmoothingStudy:
    """
    E |v_eps(t) - w(t)|^2 по eps (ось 0) и времени (ось 1) и наклон по eps в последний момент
    """

    table: SolutionTable
    slope: float
    seed: int
    n_paths: int


def smoothing_study(grid, eps_list: Sequence[float], n_paths: int, seed: int) -> SmoothingStudy:
    """Среднеквадратичное отклонение сглаженной траектории от исходной"""
    path = sample_wiener(grid, 1, seed, n_paths)
    eps = np.asarray(eps_list, dtype=float)
    mse = np.stack([np.mean(np.sum(smooth_path_ou(path, e).residual ** 2, axis=-1), axis=1) for e in eps])
    slope = float(np.polyfit(np.log(eps), np.log(mse[:, -1]), 1)[0]) if len(eps) > 1 else float('nan')
    table = SolutionTable((eps, path.times), ('epsilon', 't'), mse, "ou-smoothing",
                          diagnostics={'slope': slope})
    logger.info(f"Сглаживание: наклон по eps {slope:.3f} на {n_paths} траекториях")
    return SmoothingStudy(table=table, slope=slope, seed=int(seed), n_paths=int(n_paths))
