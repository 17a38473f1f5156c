import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ecsqfi.closed_forms import (
    ecs_eigenvalues_additive,
    ecs_gram_and_rho,
    ecs_lossless_qfi,
    ecs_lossy_qfi,
    ecs_lossy_qfi_approx,
    ecs_lossy_qfi_single_expression,
    ecs_reduced_matrix,
    ecs_spectral_data,
    heisenberg_ratio,
    noon_delta_phi_min,
    noon_optimal_n,
    noon_qfi,
    noon_superposition_qfi,
)
from ecsqfi.errors import DomainError
from ecsqfi.fock import build_ecs_rho_analytic
from ecsqfi.model import (
    GeneratorKind,
    LossChannel,
    NoonSpec,
    NoonSuperposition,
    ecs_from_alpha_sq,
    ecs_from_mean_photons,
)
from ecsqfi.specfun import lambert_w0


def test_lossless_examples():
    assert ecs_lossless_qfi(ecs_from_alpha_sq(0.0)) == 0.0
    assert ecs_lossless_qfi(ecs_from_mean_photons(100.0)) == pytest.approx(100 * 102, rel=1e-10)


@given(st.floats(min_value=1e-3, max_value=500.0))
def test_lossless_beats_noon(n):
    assert ecs_lossless_qfi(ecs_from_mean_photons(n)) > n * n


@pytest.mark.parametrize("a", [0.1, 1.0, 4.0, 30.0, 200.0])
def test_lossy_limits(a):
    spec = ecs_from_alpha_sq(a)
    br = ecs_lossy_qfi(spec, LossChannel(1.0))
    assert br.total == pytest.approx(ecs_lossless_qfi(spec), rel=1e-12)
    assert ecs_lossy_qfi(spec, LossChannel(0.0)).total == 0.0


def test_breakdown_terms_match_formulas():
    spec, ch = ecs_from_alpha_sq(4.0), LossChannel(0.9)
    br = ecs_lossy_qfi(spec, ch)
    n, t, r, a = spec.mean_photons, 0.9, 1 - 0.9, 4.0
    w = lambert_w0(n * math.exp(-n))
    assert br.classical_term == pytest.approx(2 * n * t * (1 + t * w), rel=1e-14)
    ratio = (math.exp(-2 * r * a) - math.exp(-2 * t * a)) / (1 - math.exp(-2 * t * a))
    assert br.heisenberg_term == pytest.approx((n * t) ** 2 * ratio, rel=1e-12)
    assert br.total == pytest.approx(13.138883502002, rel=1e-12)


def test_two_exact_forms_agree_on_grid():
    rng = np.random.default_rng(7)
    for a, t in zip(rng.uniform(0.01, 50, 200), rng.uniform(0.001, 1.0, 200)):
        spec, ch = ecs_from_alpha_sq(a), LossChannel(t)
        total = ecs_lossy_qfi(spec, ch).total
        assert ecs_lossy_qfi_single_expression(spec, ch) == pytest.approx(total, rel=1e-12)


def test_heisenberg_ratio_small_t_is_stable():
    # T|a|^2 = 1e-12: naive evaluation of the ratio loses every digit
    a = 1.0
    ch = LossChannel(1e-12)
    got = heisenberg_ratio(a, ch)
    exact = math.exp(-2 * (1 - 1e-12) * a) * (-math.expm1(-2 * (2e-12 - 1) * a)) / (-math.expm1(-2e-12))
    assert got == pytest.approx(exact, rel=1e-10)
    assert heisenberg_ratio(0.0, ch) == 0.0 and heisenberg_ratio(2.0, LossChannel(0.0)) == 0.0


@pytest.mark.parametrize("t", [0.8, 0.9, 1.0])
def test_ecs_precision_monotone_in_n(t):
    ns = np.geomspace(0.01, 1e3, 2000)
    d = [ecs_lossy_qfi(ecs_from_mean_photons(n), LossChannel(t)).delta_phi_min for n in ns]
    assert np.all(np.diff(d) < 0)


@pytest.mark.parametrize("a", [20.0, 40.0, 60.0])
@pytest.mark.parametrize("t", [0.8, 0.9, 0.99])
def test_heisenberg_ratio_is_decoherence_factor(a, t):
    spec, ch = ecs_from_alpha_sq(a), LossChannel(t)
    got = ecs_lossy_qfi(spec, ch).heisenberg_term / (spec.mean_photons * t) ** 2
    assert got == pytest.approx(math.exp(-2 * (1 - t) * spec.mean_photons), rel=1e-6, abs=0)


def test_heisenberg_ratio_vanishes_at_balanced_loss():
    # T = R: the two exponentials cancel, so the limit needs (T - R)|a|^2 >> 1
    assert heisenberg_ratio(20.0, LossChannel(0.5)) == 0.0


def test_approx_examples():
    br = ecs_lossy_qfi_approx(7.0, LossChannel(1.0))
    assert br.total == 2 * 7 + 49
    exact = ecs_lossy_qfi(ecs_from_mean_photons(20.0), LossChannel(0.9)).total
    assert ecs_lossy_qfi_approx(20.0, LossChannel(0.9)).total == pytest.approx(exact, rel=1e-3)
    # R n = 20
    br = ecs_lossy_qfi_approx(40.0, LossChannel(0.5))
    assert br.total == pytest.approx(2 * 40 * 0.5, rel=1e-2)
    with pytest.raises(DomainError):
        ecs_lossy_qfi_approx(-1.0, LossChannel(0.5))


def test_noon_examples():
    assert noon_qfi(NoonSpec(7), LossChannel(1.0)) == 49
    assert noon_qfi(NoonSpec(1), LossChannel(0.37)) == pytest.approx(0.37)
    assert noon_qfi(NoonSpec(4), LossChannel(0.9)) == pytest.approx(16 * 0.9**4, rel=1e-15)
    assert noon_delta_phi_min(4, LossChannel(0.9)) == pytest.approx(0.9**-2 / 4, rel=1e-15)


def test_noon_optimal_n_examples():
    assert noon_optimal_n(LossChannel(0.8)) == pytest.approx(8.963, abs=1e-3)
    assert noon_optimal_n(LossChannel(0.9)) == pytest.approx(18.982, abs=1e-3)
    assert noon_optimal_n(LossChannel(math.exp(-2.0))) == pytest.approx(1.0, rel=1e-15)
    for t in (0.0, 1.0):
        with pytest.raises(DomainError):
            noon_optimal_n(LossChannel(t))


@given(st.floats(min_value=0.3, max_value=0.995))
def test_noon_integer_optimum_adjacent(t):
    ch = LossChannel(t)
    x = noon_optimal_n(ch)
    ns = np.arange(1, int(4 * x) + 10)
    best = int(ns[np.argmin([noon_delta_phi_min(int(n), ch) for n in ns])])
    assert best in {max(1, math.floor(x)), math.ceil(x)}


def test_superposition_qfi_generators():
    c = NoonSuperposition.normalized([0, 1, 1])
    n1, n2 = 1.5, 2.5
    assert noon_superposition_qfi(c, GeneratorKind.MODE_TWO_NUMBER) == pytest.approx(2 * n2 - n1**2)
    assert noon_superposition_qfi(c, GeneratorKind.HALF_DIFFERENCE) == pytest.approx(n2)


def test_spectral_data_examples():
    sd = ecs_spectral_data(ecs_from_alpha_sq(3.0), LossChannel(1.0))
    assert sd.lambda_minus == 0.0 and sd.lambda_plus == pytest.approx(1.0, rel=1e-15)
    sd = ecs_spectral_data(ecs_from_alpha_sq(0.0), LossChannel(0.5))
    assert math.isinf(sd.eta_minus_sq)

    spec, ch = ecs_from_alpha_sq(4.0), LossChannel(0.9)
    sd = ecs_spectral_data(spec, ch)
    vals = np.linalg.eigvalsh(build_ecs_rho_analytic(spec, ch, 0.7).rho)[::-1]
    assert vals[0] == pytest.approx(sd.lambda_plus, abs=1e-10)
    assert vals[1] == pytest.approx(sd.lambda_minus, abs=1e-10)
    assert np.all(np.abs(vals[2:]) <= 1e-10)


@given(st.floats(min_value=0.01, max_value=60.0), st.floats(min_value=0.0, max_value=1.0))
def test_spectral_identities(a, t):
    spec, ch = ecs_from_alpha_sq(a), LossChannel(t)
    sd = ecs_spectral_data(spec, ch)
    assert sd.lambda_plus + sd.lambda_minus == pytest.approx(1.0, abs=1e-14)
    assert sd.lambda_plus >= 0 and sd.lambda_minus >= 0
    assert sd.eta_plus_sq == pytest.approx(1 / (2 * (1 + math.exp(-t * a))), rel=1e-14)
    if math.isfinite(sd.eta_minus_sq):
        ns = spec.norm_sq
        assert sd.lambda_plus * sd.eta_plus_sq + sd.lambda_minus * sd.eta_minus_sq == pytest.approx(ns, abs=1e-13)
        lhs = 4 * sd.lambda_plus * sd.lambda_minus * sd.eta_plus_sq * sd.eta_minus_sq
        assert lhs == pytest.approx(ns**2 * -math.expm1(-2 * (1 - t) * a), abs=1e-13)
    p, m = ecs_eigenvalues_additive(spec, ch)
    assert p == pytest.approx(sd.lambda_plus, abs=1e-14)


def test_reduced_matrix_consistency():
    spec, ch = ecs_from_alpha_sq(4.0), LossChannel(0.9)
    gram, rho = ecs_gram_and_rho(spec, ch)
    np.testing.assert_allclose(np.linalg.solve(gram, rho), ecs_reduced_matrix(spec, ch), atol=1e-14)
