import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ecsqfi.errors import ConvergenceError, DomainError
from ecsqfi.specfun import lambert_w0, ln_binomial, ln_factorial

# bisection of w e^w - 1/e on [0, 1], 200 halvings
W_OF_INV_E = 0.2784645427610738


def test_lambert_trivial_points():
    assert lambert_w0(0.0) == 0.0
    assert lambert_w0(math.e) == pytest.approx(1.0, rel=1e-14)
    assert lambert_w0(-math.exp(-1.0)) == -1.0


def test_lambert_inverse_e_matches_bisection():
    assert lambert_w0(math.exp(-1.0)) == pytest.approx(W_OF_INV_E, rel=1e-12)


def test_lambert_domain_and_tol_errors():
    with pytest.raises(DomainError):
        lambert_w0(-0.5)
    with pytest.raises(DomainError):
        lambert_w0(1.0, tol=0.0)
    with pytest.raises(ConvergenceError):
        lambert_w0(2.5, tol=1e-30)


def test_lambert_residual_on_random_grid():
    rng = np.random.default_rng(1234)
    zs = np.concatenate([
        rng.uniform(-math.exp(-1.0), 1e3, 9000),
        -math.exp(-1.0) + rng.uniform(0, 1e-3, 500),
        rng.uniform(0, 1e-6, 500),
    ])
    tol = 1e-12
    for z in zs:
        w = lambert_w0(z, tol)
        assert w >= -1.0
        assert abs(w * math.exp(w) - z) <= tol * max(1.0, abs(z))


def test_lambert_monotone():
    zs = np.linspace(-math.exp(-1.0), 50.0, 4001)
    ws = np.array([lambert_w0(z) for z in zs])
    assert np.all(np.diff(ws) > 0)


@pytest.mark.parametrize("w", np.linspace(0.0, 50.0, 101))
def test_lambert_round_trip(w):
    assert lambert_w0(w * math.exp(w)) == pytest.approx(w, rel=1e-10, abs=1e-300)


@given(st.floats(min_value=-1.0 + 1e-9, max_value=30.0))
def test_lambert_round_trip_property(w):
    z = w * math.exp(w)
    # w near -1 is ill-conditioned: compare residuals rather than w
    back = lambert_w0(z)
    assert abs(back * math.exp(back) - z) <= 1e-12 * max(1.0, abs(z))
    if w > -0.9:
        assert back == pytest.approx(w, rel=1e-9, abs=1e-12)


def test_ln_factorial_small():
    assert ln_factorial(0) == 0.0
    assert ln_factorial(1) == 0.0
    assert ln_factorial(10) == pytest.approx(math.log(3628800), rel=1e-15)


@pytest.mark.parametrize("n", [2, 3, 17, 100, 1000, 5000])
def test_ln_factorial_vs_exact_integer(n):
    assert ln_factorial(n) == pytest.approx(math.log(math.factorial(n)), rel=1e-12)


def test_ln_factorial_large_vs_sum():
    n = 10**6
    exact = math.fsum(math.log(k) for k in range(2, n + 1))
    assert ln_factorial(n) == pytest.approx(exact, rel=1e-12)


def test_ln_binomial_examples():
    assert ln_binomial(5, 0) == 0.0
    assert ln_binomial(4, 2) == pytest.approx(math.log(6), rel=1e-14)
    assert math.exp(ln_binomial(20, 10)) == pytest.approx(math.comb(20, 10), rel=1e-12)
    with pytest.raises(DomainError):
        ln_binomial(3, 4)


def test_pascal_rule():
    for n in range(1, 61):
        for k in range(1, n):
            lhs = math.exp(ln_binomial(n, k))
            rhs = math.exp(ln_binomial(n - 1, k - 1)) + math.exp(ln_binomial(n - 1, k))
            assert lhs == pytest.approx(rhs, rel=1e-10)
