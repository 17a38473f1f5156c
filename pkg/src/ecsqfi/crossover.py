"""Where the lossy NOON state beats the lossy ECS.

The NOON photon number is treated as continuous (N = n) so both states
share one abscissa. Comparisons are made on ln F_Q, which spans many
decades over the search range.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .closed_forms import ecs_lossy_qfi, ecs_lossy_qfi_approx
from .errors import ConvergenceError, DomainError
from .model import LossChannel, ecs_from_mean_photons

ROOT_XTOL = 1e-6
DEFAULT_SEARCH_MAX = 1e4
DEFAULT_GRID_POINTS = 200


class CrossoverMode(enum.Enum):
    APPROX = "approx"  # large-n form 2nT + (nT)^2 e^{-2Rn}
    EXACT = "exact"


def ecs_qfi_for_mode(n_bar: float, channel: LossChannel, mode: CrossoverMode) -> float:
    if mode is CrossoverMode.APPROX:
        return ecs_lossy_qfi_approx(n_bar, channel).total
    return ecs_lossy_qfi(ecs_from_mean_photons(n_bar), channel).total


def log_qfi_gap(n_bar: float, channel: LossChannel, mode: CrossoverMode = CrossoverMode.APPROX) -> float:
    """ln F_NOON(N = n) - ln F_ECS(n); positive where NOON is preferable."""
    t = channel.transmission
    ln_noon = 2.0 * math.log(n_bar) + n_bar * math.log(t)
    return ln_noon - math.log(ecs_qfi_for_mode(n_bar, channel, mode))


@dataclass(frozen=True)
class CrossoverResult:
    transmission: float
    roots: tuple[float, ...]
    bracket: tuple[float, float]
    mode: CrossoverMode = CrossoverMode.APPROX


def _check_t(t: float) -> LossChannel:
    if not 0.0 < t < 1.0:
        raise DomainError(f"crossover needs 0 < T < 1, got {t}")
    return LossChannel(t)


def _refine_peak(gap, grid: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    i = int(np.argmax(values))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    if hi <= lo:
        return float(grid[i]), float(values[i])
    res = optimize.minimize_scalar(lambda x: -gap(x), bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-10})
    if -res.fun > values[i]:
        return float(res.x), float(-res.fun)
    return float(grid[i]), float(values[i])


def crossover_roots(
    t: float,
    mode: CrossoverMode = CrossoverMode.APPROX,
    search_max: float = DEFAULT_SEARCH_MAX,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> CrossoverResult:
    """All n in [1, search_max] where the NOON and ECS QFIs coincide.

    A geometric scan brackets sign changes of :func:`log_qfi_gap`, which
    are then bisected to ``ROOT_XTOL``. If the scan sees no positive value,
    the largest grid value is refined so a narrow region just above the
    critical transmission is not missed. No sign change yields empty
    ``roots``.
    """
    channel = _check_t(t)
    if not search_max > 1.0:
        raise DomainError(f"search_max must exceed 1, got {search_max}")

    def gap(x):
        return log_qfi_gap(x, channel, mode)

    grid = np.geomspace(1.0, search_max, grid_points)
    values = np.array([gap(x) for x in grid])
    if not np.any(values > 0):
        x_peak, v_peak = _refine_peak(gap, grid, values)
        if v_peak > 0:
            k = int(np.searchsorted(grid, x_peak))
            grid = np.insert(grid, k, x_peak)
            values = np.insert(values, k, v_peak)

    roots = []
    for i in np.nonzero(np.signbit(values[:-1]) != np.signbit(values[1:]))[0]:
        root = optimize.bisect(gap, grid[i], grid[i + 1], xtol=ROOT_XTOL, maxiter=200)
        roots.append(float(root))
    return CrossoverResult(t, tuple(sorted(roots)), (1.0, float(search_max)), mode)


def crossover_peak(
    t: float,
    mode: CrossoverMode = CrossoverMode.APPROX,
    search_max: float = DEFAULT_SEARCH_MAX,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> tuple[float, float]:
    """(n, gap) at the maximum of :func:`log_qfi_gap` over [1, search_max]."""
    channel = _check_t(t)

    def gap(x):
        return log_qfi_gap(x, channel, mode)

    grid = np.geomspace(1.0, search_max, grid_points)
    values = np.array([gap(x) for x in grid])
    return _refine_peak(gap, grid, values)


def critical_point(
    tol: float = 1e-7,
    mode: CrossoverMode = CrossoverMode.APPROX,
    bracket: tuple[float, float] = (0.8, 0.95),
    max_iter: int = 200,
) -> tuple[float, float]:
    """Transmission below which no crossover exists, and where the root pair merges.

    Bisects on T the sign of the peak gap; at the merge point the two roots
    coincide with the peak location.
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    lo, hi = bracket
    if crossover_peak(lo, mode)[1] > 0 or crossover_peak(hi, mode)[1] <= 0:
        raise ConvergenceError(f"bracket {bracket} does not enclose the critical transmission")
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if crossover_peak(mid, mode)[1] > 0:
            hi = mid
        else:
            lo = mid
    else:
        raise ConvergenceError("critical-point bisection did not converge")
    t_c = 0.5 * (lo + hi)
    return t_c, crossover_peak(t_c, mode)[0]


def fitted_boundaries(t: float) -> tuple[float, float]:
    """Published fits (n_upper, n_lower) = (3.2 T^6 / R^1.15, 1.4 T^-3 / R^0.5)."""
    if not 0.0 < t < 1.0:
        raise DomainError(f"fitted boundaries need 0 < T < 1, got {t}")
    r = 1.0 - t
    return 3.2 * t**6 / r**1.15, 1.4 * t**-3 / r**0.5
