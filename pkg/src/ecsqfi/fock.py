"""Truncated Fock-space numerics in the two-mode "branch" subspace.

Every state handled here has all photons in one arm and vacuum in the
other, so it lives in span{|n>|0>, |0>|m>}. The loss channel never leaves
that subspace, which keeps the dimension at 2*n_max + 1 instead of
(n_max + 1)**2.

Index layout of :class:`BranchBasis`: 0 is the shared vacuum |0,0>,
1..n_max are |n,0>, and n_max+1..2*n_max are |0,m>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CutoffError, DomainError, NumericalError
from .model import EcsSpec, GeneratorKind, LossChannel, NoonSpec, NoonSuperposition

DEFAULT_TAIL_TOL = 1e-12


@dataclass(frozen=True)
class BranchBasis:
    n_max: int

    def __post_init__(self):
        if self.n_max < 0:
            raise DomainError(f"n_max must be >= 0, got {self.n_max}")

    @property
    def dim(self) -> int:
        return 2 * self.n_max + 1

    @property
    def labels(self) -> list[tuple[int, int]]:
        """Occupations (n1, n2) per basis index."""
        return list(zip(self.n1.tolist(), self.n2.tolist()))

    @property
    def n1(self) -> np.ndarray:
        out = np.zeros(self.dim, dtype=int)
        out[1 : self.n_max + 1] = np.arange(1, self.n_max + 1)
        return out

    @property
    def n2(self) -> np.ndarray:
        out = np.zeros(self.dim, dtype=int)
        out[self.n_max + 1 :] = np.arange(1, self.n_max + 1)
        return out

    def index(self, mode: int, n: int) -> int:
        if not 0 <= n <= self.n_max:
            raise DomainError(f"occupation {n} outside cutoff {self.n_max}")
        if n == 0:
            return 0
        if mode == 1:
            return n
        if mode == 2:
            return self.n_max + n
        raise DomainError(f"mode must be 1 or 2, got {mode}")

    def mode_indices(self, mode: int) -> np.ndarray:
        """Branch indices of |0>, |1>, ..., |n_max> in the given mode."""
        return np.array([self.index(mode, n) for n in range(self.n_max + 1)])

    def embed(self, single_mode: np.ndarray, mode: int) -> np.ndarray:
        """Lift a single-mode ket (other mode in vacuum) into the branch basis."""
        single_mode = np.asarray(single_mode, dtype=complex)
        if single_mode.shape != (self.n_max + 1,):
            raise DomainError("single-mode vector length must be n_max + 1")
        out = np.zeros(self.dim, dtype=complex)
        out[self.mode_indices(mode)] = single_mode
        return out

    def generator_diagonal(self, generator: GeneratorKind) -> np.ndarray:
        if generator is GeneratorKind.MODE_TWO_NUMBER:
            return self.n2.astype(float)
        return 0.5 * (self.n2 - self.n1).astype(float)


@dataclass(frozen=True, eq=False)
class PureState:
    basis: BranchBasis
    amplitudes: np.ndarray
    derivative: np.ndarray | None = None

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


@dataclass(frozen=True, eq=False)
class LabeledDensityMatrix:
    basis: BranchBasis
    rho: np.ndarray
    drho_dphi: np.ndarray | None = None

    @property
    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    def restrict(self, n_max: int) -> LabeledDensityMatrix:
        """Block of rho (and its derivative) on a smaller cutoff."""
        if n_max > self.basis.n_max:
            raise DomainError("cannot restrict to a larger cutoff")
        small = BranchBasis(n_max)
        big = self.basis.n_max
        idx = np.r_[0 : n_max + 1, big + 1 : big + 1 + n_max]
        sub = np.ix_(idx, idx)
        d = None if self.drho_dphi is None else self.drho_dphi[sub]
        return LabeledDensityMatrix(small, self.rho[sub], d)

    def check(self, tail_tol: float = DEFAULT_TAIL_TOL) -> LabeledDensityMatrix:
        """Raise :class:`NumericalError` unless rho is a valid truncated state."""
        rho = self.rho
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > 1e-12:
            raise NumericalError("rho is not Hermitian")
        if abs(self.trace - 1.0) > max(tail_tol, 1e-12):
            raise NumericalError(f"trace {self.trace!r} outside tail bound {tail_tol}")
        if np.linalg.eigvalsh(rho)[0] < -1e-10:
            raise NumericalError("rho is not positive semidefinite")
        d = self.drho_dphi
        if d is not None:
            if np.max(np.abs(d - d.conj().T), initial=0.0) > 1e-12:
                raise NumericalError("drho/dphi is not Hermitian")
            if abs(np.trace(d)) > 1e-12:
                raise NumericalError("drho/dphi is not traceless")
        return self


def _ln_factorials(n_max: int) -> np.ndarray:
    out = np.zeros(n_max + 1)
    if n_max > 0:
        out[1:] = np.cumsum(np.log(np.arange(1, n_max + 1)))
    return out


def coherent_amplitude(n: int, alpha: complex) -> complex:
    """<n|alpha> = alpha^n exp(-|alpha|^2/2) / sqrt(n!), evaluated in log space."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    r = abs(alpha)
    if r == 0.0:
        return 1.0 + 0j if n == 0 else 0j
    log_mag = n * math.log(r) - 0.5 * r * r - 0.5 * math.lgamma(n + 1.0)
    return math.exp(log_mag) * complex(math.cos(n * np.angle(alpha)), math.sin(n * np.angle(alpha)))


def coherent_amplitudes(alpha: complex, n_max: int) -> np.ndarray:
    """Vector of <n|alpha> for n = 0..n_max."""
    n = np.arange(n_max + 1)
    r = abs(alpha)
    if r == 0.0:
        out = np.zeros(n_max + 1, dtype=complex)
        out[0] = 1.0
        return out
    mag = np.exp(n * math.log(r) - 0.5 * r * r - 0.5 * _ln_factorials(n_max))
    return mag * np.exp(1j * n * np.angle(alpha))


def poisson_tail(mean: float, n_max: int) -> float:
    """Photon-number weight above ``n_max`` of a coherent state with <n> = mean."""
    if mean == 0.0:
        return 0.0
    hi = int(math.ceil(mean + 40.0 * math.sqrt(mean) + 60.0))
    if n_max >= hi:
        return 0.0
    n = np.arange(n_max + 1, hi + 1)
    log_p = n * math.log(mean) - mean - np.array([math.lgamma(k + 1.0) for k in n])
    return float(np.sum(np.exp(log_p)))


def cutoff_cap(alpha_sq: float) -> int:
    return int(math.ceil(alpha_sq + 10.0 * math.sqrt(alpha_sq) + 20.0))


def choose_cutoff(alpha_sq: float, tail_tol: float = DEFAULT_TAIL_TOL) -> int:
    """Smallest n_max whose Poisson tail is below ``tail_tol``.

    The search stops at ``alpha_sq + 10 sqrt(alpha_sq) + 20``; if even that
    cutoff misses the bound, the cap is returned.
    """
    if alpha_sq < 0:
        raise DomainError(f"alpha_sq must be >= 0, got {alpha_sq}")
    if not 0.0 < tail_tol < 1.0:
        raise DomainError(f"tail_tol must lie in (0, 1), got {tail_tol}")
    if alpha_sq == 0.0:
        return 0
    cap = cutoff_cap(alpha_sq)
    hi = int(math.ceil(alpha_sq + 40.0 * math.sqrt(alpha_sq) + 60.0))
    n = np.arange(hi + 1)
    p = np.exp(n * math.log(alpha_sq) - alpha_sq - _ln_factorials(hi))
    # tails[k] = sum_{n > k} p_n, summed from the small end
    tails = np.concatenate([np.cumsum(p[::-1])[::-1][1:], [0.0]])
    ok = np.nonzero(tails[: cap + 1] <= tail_tol)[0]
    return int(ok[0]) if ok.size else cap


def _check_tail(mean: float, n_max: int, tail_tol: float) -> None:
    tail = poisson_tail(mean, n_max)
    if tail > tail_tol:
        raise CutoffError(
            f"cutoff n_max={n_max} leaves tail {tail:.3g} > {tail_tol:.3g} for <n>={mean:.6g}"
        )


def _phase_factors(basis: BranchBasis, generator: GeneratorKind, phi: float) -> np.ndarray:
    return np.exp(1j * phi * basis.generator_diagonal(generator))


def build_noon_superposition(
    c: NoonSuperposition,
    phi: float,
    generator: GeneratorKind = GeneratorKind.MODE_TWO_NUMBER,
    n_max: int | None = None,
) -> PureState:
    """exp(i phi G) sum_n c_n (|n>_1 + |n>_2)/sqrt(2), with its phi-derivative."""
    n_max = c.n_max if n_max is None else n_max
    if c.n_max > n_max:
        raise DomainError(f"{c.n_max + 1} coefficients exceed cutoff n_max={n_max}")
    basis = BranchBasis(n_max)
    coeffs = np.zeros(n_max + 1, dtype=complex)
    coeffs[: c.n_max + 1] = c.coefficients
    amps = np.zeros(basis.dim, dtype=complex)
    amps[0] = coeffs[0]
    amps[1 : n_max + 1] = coeffs[1:] / math.sqrt(2.0)
    amps[n_max + 1 :] = coeffs[1:] / math.sqrt(2.0)
    amps *= _phase_factors(basis, generator, phi)
    deriv = 1j * basis.generator_diagonal(generator) * amps
    return PureState(basis, amps, deriv)


def ecs_superposition(spec: EcsSpec, n_max: int) -> NoonSuperposition:
    """ECS written as NOON-superposition coefficients, truncated at n_max.

    c_0 = 2 N d_0 (both branches share the vacuum), c_n = sqrt(2) N d_n.
    """
    d = coherent_amplitudes(spec.alpha, n_max)
    norm = math.sqrt(spec.norm_sq)
    c = math.sqrt(2.0) * norm * d
    c[0] = 2.0 * norm * d[0]
    slack = 2.0 * spec.norm_sq * poisson_tail(spec.alpha_sq, n_max) + 1e-12
    return NoonSuperposition(c, atol=slack)


def build_ecs_state(
    spec: EcsSpec,
    phi: float,
    n_max: int | None = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> PureState:
    """Lossless ECS after the phase shift exp(i phi n_2)."""
    if n_max is None:
        n_max = choose_cutoff(spec.alpha_sq, tail_tol)
    _check_tail(spec.alpha_sq, n_max, tail_tol)
    basis = BranchBasis(n_max)
    d1 = coherent_amplitudes(spec.alpha, n_max)
    d2 = d1 * np.exp(1j * phi * np.arange(n_max + 1))
    norm = math.sqrt(spec.norm_sq)
    amps = norm * (basis.embed(d1, 1) + basis.embed(d2, 2))
    deriv = norm * basis.embed(1j * np.arange(n_max + 1) * d2, 2)
    return PureState(basis, amps, deriv)


def pure_qfi(state: PureState, generator: GeneratorKind | None = None) -> float:
    """Pure-state QFI.

    With a generator this is 4 Var(G) on the state; otherwise it is
    4(<psi'|psi'> - |<psi'|psi>|^2) from the stored derivative.
    """
    psi = state.amplitudes
    if generator is not None:
        g = state.basis.generator_diagonal(generator)
        p = np.abs(psi) ** 2
        mean = p @ g
        return float(4.0 * (p @ g**2 - mean**2))
    if state.derivative is None:
        raise DomainError("state has no derivative and no generator was given")
    dpsi = state.derivative
    return float(4.0 * (np.vdot(dpsi, dpsi).real - abs(np.vdot(dpsi, psi)) ** 2))


def loss_kraus_operators(basis: BranchBasis, channel: LossChannel):
    """Amplitude-damping Kraus operators restricted to the branch subspace.

    Each operator is returned as ``(src, dst, weight)`` index arrays meaning
    K|src_k> = weight_k |dst_k>. Two-mode operators K_l (x) K_l' with both
    l, l' > 0 annihilate the subspace and are omitted.
    """
    t, r = channel.transmission, channel.loss
    n_tot = basis.n1 + basis.n2
    ops = [(np.arange(basis.dim), np.arange(basis.dim), np.sqrt(t**n_tot))]
    for mode in (1, 2):
        idx = basis.mode_indices(mode)
        for l in range(1, basis.n_max + 1):
            n = np.arange(l, basis.n_max + 1)
            w = np.sqrt([math.comb(int(k), l) * t ** (k - l) * r**l for k in n])
            ops.append((idx[n], idx[n - l], w))
    return ops


def _apply_kraus(ops, rho: np.ndarray) -> np.ndarray:
    out = np.zeros_like(rho)
    for src, dst, w in ops:
        out[np.ix_(dst, dst)] += np.outer(w, w) * rho[np.ix_(src, src)]
    return out


def apply_loss_channel(state: PureState, channel: LossChannel) -> LabeledDensityMatrix:
    """Send a pure branch-basis state through symmetric photon loss.

    The derivative, when present, is propagated through the same (linear)
    channel.
    """
    ops = loss_kraus_operators(state.basis, channel)
    rho = _apply_kraus(ops, state.projector())
    drho = None
    if state.derivative is not None:
        d0 = np.outer(state.derivative, state.amplitudes.conj())
        drho = _apply_kraus(ops, d0 + d0.conj().T)
    return LabeledDensityMatrix(state.basis, rho, drho)


def ecs_rho_via_channel(
    spec: EcsSpec,
    channel: LossChannel,
    phi: float,
    n_max: int | None = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> LabeledDensityMatrix:
    """Lossy ECS state from the Kraus channel acting on the lossless ECS.

    The input is truncated at a tail of ``tail_tol**2`` and the output
    restricted to ``n_max``: elements near the cutoff are sums of products
    of amplitudes, so the input must be truncated at amplitude level.
    """
    if n_max is None:
        n_max = choose_cutoff(spec.alpha_sq, tail_tol)
    padded = max(n_max, choose_cutoff(spec.alpha_sq, tail_tol**2))
    state = build_ecs_state(spec, phi, padded, tail_tol)
    return apply_loss_channel(state, channel).restrict(n_max)


def build_ecs_rho_analytic(
    spec: EcsSpec,
    channel: LossChannel,
    phi: float,
    n_max: int | None = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> LabeledDensityMatrix:
    """Lossy ECS state from the damped coherent branches and their overlap e^{-R|a|^2}."""
    if n_max is None:
        n_max = choose_cutoff(spec.alpha_sq, tail_tol)
    t, r = channel.transmission, channel.loss
    _check_tail(t * spec.alpha_sq, n_max, tail_tol)
    basis = BranchBasis(n_max)
    n = np.arange(n_max + 1)
    u = coherent_amplitudes(math.sqrt(t) * spec.alpha, n_max)
    v = u * np.exp(1j * n * phi)
    e1 = basis.embed(u, 1)
    e2 = basis.embed(v, 2)
    de2 = basis.embed(1j * n * v, 2)
    coh = math.exp(-r * spec.alpha_sq)

    def outer(a, b):
        return np.outer(a, b.conj())

    rho = spec.norm_sq * (outer(e1, e1) + outer(e2, e2) + coh * (outer(e1, e2) + outer(e2, e1)))
    drho = spec.norm_sq * (
        outer(de2, e2) + outer(e2, de2) + coh * (outer(e1, de2) + outer(de2, e1))
    )
    return LabeledDensityMatrix(basis, rho, drho)


def build_noon_rho(
    spec: NoonSpec,
    channel: LossChannel,
    phi: float,
    generator: GeneratorKind = GeneratorKind.MODE_TWO_NUMBER,
    n_max: int | None = None,
) -> LabeledDensityMatrix:
    """Lossy NOON state: binomial Fock mixture plus the surviving NOON coherence."""
    big_n = spec.photon_number
    n_max = big_n if n_max is None else n_max
    if n_max < big_n:
        raise CutoffError(f"cutoff n_max={n_max} below photon number {big_n}")
    t, r = channel.transmission, channel.loss
    basis = BranchBasis(n_max)
    rho = np.zeros((basis.dim, basis.dim), dtype=complex)
    for k in range(big_n):
        lam = math.comb(big_n, k) * t**k * r ** (big_n - k) / 2.0
        for mode in (1, 2):
            i = basis.index(mode, k)
            rho[i, i] += lam
    psi = np.zeros(basis.dim, dtype=complex)
    psi[basis.index(1, big_n)] = 1.0
    psi[basis.index(2, big_n)] = 1.0
    psi *= _phase_factors(basis, generator, phi) / math.sqrt(2.0)
    dpsi = 1j * basis.generator_diagonal(generator) * psi
    weight = t**big_n
    rho += weight * np.outer(psi, psi.conj())
    d = weight * np.outer(dpsi, psi.conj())
    return LabeledDensityMatrix(basis, rho, d + d.conj().T)


def apply_phase(rho: LabeledDensityMatrix, generator: GeneratorKind, phi: float) -> np.ndarray:
    """U rho U^dagger for U = exp(i phi G), diagonal in the branch basis."""
    u = _phase_factors(rho.basis, generator, phi)
    return u[:, None] * rho.rho * u.conj()[None, :]
