"""Scalar special functions: principal-branch Lambert W, log-factorial, log-binomial."""

import math

from .errors import ConvergenceError, DomainError

BRANCH_POINT = -math.exp(-1.0)
MAX_HALLEY_ITERATIONS = 64


def _initial_guess(z: float) -> float:
    if z < -0.25:
        # series about the branch point z = -1/e
        p = math.sqrt(max(2.0 * (math.e * z + 1.0), 0.0))
        return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3
    if z <= 3.0:
        return math.log1p(z)
    l1 = math.log(z)
    l2 = math.log(l1)
    return l1 - l2 + l2 / l1


def lambert_w0(z: float, tol: float = 1e-12) -> float:
    """Principal branch of the Lambert W function, ``w * exp(w) = z``.

    Halley iteration from a branch-appropriate starting point. Converged
    when ``|w e^w - z| <= tol * |z|``.

    Parameters
    ----------
    z : float
        Argument, ``z >= -1/e``.
    tol : float
        Relative residual target.

    Returns
    -------
    float
        ``w >= -1``.

    Raises
    ------
    DomainError
        If ``z < -1/e`` or ``tol <= 0``.
    ConvergenceError
        If the residual target is not met within the iteration cap.
    """
    z = float(z)
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    if math.isnan(z) or z < BRANCH_POINT:
        raise DomainError(f"lambert_w0 undefined for z={z!r} < -1/e")
    if math.isinf(z):
        raise DomainError("lambert_w0 requires finite z")
    if z == 0.0:
        return 0.0
    if z == BRANCH_POINT:
        return -1.0

    w = _initial_guess(z)
    for _ in range(MAX_HALLEY_ITERATIONS):
        ew = math.exp(w)
        f = w * ew - z
        if abs(f) <= tol * abs(z):
            return w
        wp1 = w + 1.0
        if wp1 == 0.0:
            # landed on the branch point while z is slightly above it
            w = -1.0 + math.sqrt(2.0 * (math.e * z + 1.0))
            continue
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if w < -1.0:
            w = -1.0 + 1e-300
    raise ConvergenceError(
        f"lambert_w0({z!r}) did not reach relative residual {tol} "
        f"in {MAX_HALLEY_ITERATIONS} iterations"
    )


def ln_factorial(n: int) -> float:
    """ln(n!) via the log-gamma function."""
    if n < 0:
        raise DomainError(f"ln_factorial requires n >= 0, got {n}")
    if n < 2:
        return 0.0
    return math.lgamma(n + 1.0)


def ln_binomial(n: int, k: int) -> float:
    """ln of the binomial coefficient ``n choose k``."""
    if n < 0 or k < 0 or k > n:
        raise DomainError(f"ln_binomial requires 0 <= k <= n, got n={n}, k={k}")
    return ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
