import math

import numpy as np
import pytest

from ecsqfi.closed_forms import ecs_lossy_qfi, noon_qfi
from ecsqfi.crossover import (
    CrossoverMode,
    critical_point,
    crossover_peak,
    crossover_roots,
    ecs_qfi_for_mode,
    fitted_boundaries,
    log_qfi_gap,
)
from ecsqfi.errors import ConvergenceError, DomainError
from ecsqfi.model import LossChannel, ecs_from_mean_photons

APPROX, EXACT = CrossoverMode.APPROX, CrossoverMode.EXACT


def test_roots_examples():
    lo, hi = crossover_roots(0.9).roots
    assert lo == pytest.approx(6.4, abs=0.2) and hi == pytest.approx(23.5, abs=0.2)
    assert crossover_roots(0.5).roots == ()


@pytest.mark.parametrize("t", [0.87, 0.9, 0.95])
@pytest.mark.parametrize("mode", list(CrossoverMode))
def test_gap_vanishes_at_roots(t, mode):
    res = crossover_roots(t, mode)
    assert list(res.roots) == sorted(res.roots) and len(res.roots) == 2
    ch = LossChannel(t)
    for r in res.roots:
        assert abs(log_qfi_gap(r, ch, mode)) < 1e-5


@pytest.mark.parametrize("t", [0.87, 0.9, 0.95, 0.99])
def test_interior_dominance(t):
    ch = LossChannel(t)
    lo, hi = crossover_roots(t).roots
    for n in np.linspace(lo, hi, 12)[1:-1]:
        assert noon_qfi(n, ch) > ecs_qfi_for_mode(n, ch, APPROX)
    for n in np.concatenate([np.linspace(1, lo, 8)[:-1], np.geomspace(hi, 1e4, 8)[1:]]):
        assert ecs_qfi_for_mode(n, ch, APPROX) >= noon_qfi(n, ch)


@pytest.mark.parametrize("t", [0.9, 0.95, 0.99])
def test_upper_root_meets_classical_term(t):
    ch = LossChannel(t)
    hi = crossover_roots(t).roots[1]
    classical = ecs_lossy_qfi(ecs_from_mean_photons(hi), ch).classical_term
    assert noon_qfi(hi, ch) == pytest.approx(classical, rel=0.3)


@pytest.mark.parametrize("t", [0.9, 0.95, 0.99])
def test_modes_agree_at_high_transmission(t):
    a = crossover_roots(t, APPROX).roots
    e = crossover_roots(t, EXACT).roots
    for x, y in zip(a, e):
        assert abs(x - y) / y < 0.02


@pytest.mark.parametrize("t", [0.87, 0.9, 0.95, 0.99])
def test_fit_quality(t):
    n_up, n_lo = fitted_boundaries(t)
    lo, hi = crossover_roots(t).roots
    assert lo == pytest.approx(n_lo, rel=0.2)
    assert hi == pytest.approx(n_up, rel=0.2)


def test_fitted_boundaries_examples():
    up, lo = fitted_boundaries(0.9)
    assert up == pytest.approx(3.2 * 0.9**6 / 0.1**1.15, rel=1e-15)
    assert up == pytest.approx(24.0, abs=0.05)
    assert lo == pytest.approx(6.07, abs=0.01)
    prev = fitted_boundaries(0.99)
    cur = fitted_boundaries(0.99999)
    assert cur[0] > prev[0] and cur[1] > prev[1] and all(map(math.isfinite, cur))
    with pytest.raises(DomainError):
        fitted_boundaries(1.0)


def test_critical_point_brackets():
    t_c, n_c = critical_point(tol=1e-6)
    assert t_c == pytest.approx(0.854, abs=0.005)
    assert n_c == pytest.approx(8.58, abs=0.1)
    assert len(crossover_roots(t_c + 0.01).roots) == 2
    assert crossover_roots(t_c - 0.01).roots == ()
    assert crossover_peak(t_c)[1] == pytest.approx(0.0, abs=1e-5)


def test_errors():
    with pytest.raises(DomainError):
        crossover_roots(1.0)
    with pytest.raises(DomainError):
        crossover_roots(0.9, search_max=1.0)
    with pytest.raises(DomainError):
        critical_point(tol=0.0)
    with pytest.raises(ConvergenceError):
        critical_point(bracket=(0.9, 0.95))
