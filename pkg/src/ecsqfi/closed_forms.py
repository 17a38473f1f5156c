"""Exact and asymptotic QFI expressions for entangled coherent and NOON states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError
from .model import (
    EcsSpec,
    GeneratorKind,
    LossChannel,
    NoonSpec,
    NoonSuperposition,
    QfiBreakdown,
    delta_phi_min,
)
from .specfun import lambert_w0

FORM_AGREEMENT_RTOL = 1e-12


def _one_minus_exp_neg(x: float) -> float:
    """1 - e^{-x}, accurate for small x."""
    return -math.expm1(-x)


def ecs_lossless_qfi(spec: EcsSpec) -> float:
    """2n[1 + W0(n e^{-n})] + n^2 for the lossless ECS."""
    n = spec.mean_photons
    w = lambert_w0(n * math.exp(-n))
    return 2.0 * n * (1.0 + w) + n * n


def heisenberg_ratio(alpha_sq: float, channel: LossChannel) -> float:
    """(e^{-2R|a|^2} - e^{-2T|a|^2}) / (1 - e^{-2T|a|^2}), zero at T = 0 or |a| = 0."""
    t, r = channel.transmission, channel.loss
    if t == 0.0 or alpha_sq == 0.0:
        return 0.0
    # e^{-2Ra} - e^{-2Ta} = e^{-2Ra} (1 - e^{-2(T-R)a})
    num = -math.exp(-2.0 * r * alpha_sq) * math.expm1(-2.0 * (t - r) * alpha_sq)
    return num / _one_minus_exp_neg(2.0 * t * alpha_sq)


def ecs_lossy_qfi_single_expression(spec: EcsSpec, channel: LossChannel) -> float:
    """Exact lossy-ECS QFI written directly in |a|^2 and the normalization.

    4N^2 |a|^2 T [1 + |a|^2 T - N^2 |a|^2 T (1 + (1 - e^{-2R|a|^2})/(1 - e^{-2T|a|^2}))]
    """
    t, r = channel.transmission, channel.loss
    a = spec.alpha_sq
    if t == 0.0 or a == 0.0:
        return 0.0
    ratio = _one_minus_exp_neg(2.0 * r * a) / _one_minus_exp_neg(2.0 * t * a)
    at = a * t
    return 4.0 * spec.norm_sq * at * (1.0 + at - spec.norm_sq * at * (1.0 + ratio))


def ecs_lossy_qfi(spec: EcsSpec, channel: LossChannel) -> QfiBreakdown:
    """Exact QFI of the ECS under symmetric loss, split into classical and Heisenberg terms.

    F_cl = 2nT[1 + T W0(n e^{-n})] and F_HL = (nT)^2 times
    :func:`heisenberg_ratio`. The result is cross-checked against
    :func:`ecs_lossy_qfi_single_expression`.
    """
    t = channel.transmission
    n = spec.mean_photons
    if t == 0.0 or n == 0.0:
        return QfiBreakdown(0.0, classical_term=0.0, heisenberg_term=0.0)
    w = lambert_w0(n * math.exp(-n))
    classical = 2.0 * n * t * (1.0 + t * w)
    heisenberg = (n * t) ** 2 * heisenberg_ratio(spec.alpha_sq, channel)
    total = classical + heisenberg
    other = ecs_lossy_qfi_single_expression(spec, channel)
    # the single expression subtracts terms of size 4N^2 (aT)^2; scale the check by that
    at = spec.alpha_sq * t
    cancellation = max(1.0, 4.0 * spec.norm_sq * at * (1.0 + at) / total)
    if abs(total - other) > FORM_AGREEMENT_RTOL * cancellation * abs(total):
        raise NumericalError(
            f"exact ECS QFI forms disagree: {total!r} vs {other!r} "
            f"(|a|^2={spec.alpha_sq}, T={t})"
        )
    return QfiBreakdown(total, classical_term=classical, heisenberg_term=heisenberg)


def ecs_lossy_qfi_approx(n_bar: float, channel: LossChannel) -> QfiBreakdown:
    """Large-n, low-loss form 2nT + (nT)^2 e^{-2Rn}."""
    if n_bar < 0:
        raise DomainError(f"n_bar must be >= 0, got {n_bar}")
    t, r = channel.transmission, channel.loss
    classical = 2.0 * n_bar * t
    heisenberg = (n_bar * t) ** 2 * math.exp(-2.0 * r * n_bar)
    return QfiBreakdown(classical + heisenberg, classical_term=classical, heisenberg_term=heisenberg)


def noon_qfi(spec: NoonSpec | float, channel: LossChannel) -> float:
    """N^2 T^N. A plain float N is accepted for continuous-N sweeps."""
    n = spec.photon_number if isinstance(spec, NoonSpec) else float(spec)
    return n * n * channel.transmission**n


def noon_delta_phi_min(spec: NoonSpec | float, channel: LossChannel) -> float:
    return delta_phi_min(noon_qfi(spec, channel))


def noon_optimal_n(channel: LossChannel) -> float:
    """Real-valued minimizer -2/ln T of T^{-N/2}/N."""
    t = channel.transmission
    if not 0.0 < t < 1.0:
        raise DomainError(f"optimal NOON size needs 0 < T < 1, got {t}")
    return -2.0 / math.log(t)


def noon_superposition_qfi(c: NoonSuperposition, generator: GeneratorKind) -> float:
    """Lossless QFI from photon-number moments: 2<n^2> - <n>^2, or <n^2> for (n2-n1)/2."""
    n1, n2 = c.moments()
    if generator is GeneratorKind.MODE_TWO_NUMBER:
        return 2.0 * n2 - n1 * n1
    return n2


@dataclass(frozen=True)
class EcsSpectralData:
    lambda_plus: float
    lambda_minus: float
    eta_plus_sq: float
    eta_minus_sq: float


def ecs_eigenvalues_additive(spec: EcsSpec, channel: LossChannel) -> tuple[float, float]:
    """N^2[(1 + e^{-|a|^2}) +- (e^{-T|a|^2} + e^{-R|a|^2})]."""
    a = spec.alpha_sq
    t, r = channel.transmission, channel.loss
    base = 1.0 + math.exp(-a)
    shift = math.exp(-t * a) + math.exp(-r * a)
    return spec.norm_sq * (base + shift), spec.norm_sq * (base - shift)


def ecs_spectral_data(spec: EcsSpec, channel: LossChannel) -> EcsSpectralData:
    """Nonzero eigenvalues of the lossy ECS state and the eigenvector normalizations.

    eta_minus_sq is infinite when T|a|^2 = 0 (the minus eigenvector does not
    exist; its eigenvalue is then zero).
    """
    a = spec.alpha_sq
    t, r = channel.transmission, channel.loss
    lam_p = spec.norm_sq * (1.0 + math.exp(-r * a)) * (1.0 + math.exp(-t * a))
    lam_m = spec.norm_sq * _one_minus_exp_neg(r * a) * _one_minus_exp_neg(t * a)
    add_p, add_m = ecs_eigenvalues_additive(spec, channel)
    if abs(add_p - lam_p) > 1e-14 or abs(add_m - lam_m) > 1e-14:
        raise NumericalError("factored and additive ECS eigenvalues disagree")
    gap = _one_minus_exp_neg(t * a)
    eta_m_sq = math.inf if gap == 0.0 else 0.5 / gap
    return EcsSpectralData(lam_p, lam_m, 0.5 / (1.0 + math.exp(-t * a)), eta_m_sq)


def ecs_reduced_matrix(spec: EcsSpec, channel: LossChannel) -> np.ndarray:
    """A^{-1} rho in the non-orthogonal basis {|sqrt(T) a>_1, |sqrt(T) a e^{i phi}>_2}."""
    a = spec.alpha_sq
    t, r = channel.transmission, channel.loss
    diag = 1.0 + math.exp(-a)
    off = math.exp(-t * a) + math.exp(-r * a)
    return spec.norm_sq * np.array([[diag, off], [off, diag]])


def ecs_gram_and_rho(spec: EcsSpec, channel: LossChannel) -> tuple[np.ndarray, np.ndarray]:
    """Gram matrix A_ij = <Phi_i|Phi_j> and rho_ij = <Phi_i|rho|Phi_j> of the two damped branches.

    Both are phi-independent: the branch overlap only involves the vacuum.
    """
    a = spec.alpha_sq
    t, r = channel.transmission, channel.loss
    s = math.exp(-t * a)
    gram = np.array([[1.0, s], [s, 1.0]])
    weights = spec.norm_sq * np.array([[1.0, math.exp(-r * a)], [math.exp(-r * a), 1.0]])
    return gram, gram @ weights @ gram
