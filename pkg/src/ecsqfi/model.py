"""Loss channels, probe-state parameterizations and QFI result records."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .specfun import lambert_w0


@dataclass(frozen=True)
class LossChannel:
    """Symmetric photon loss on both interferometer arms.

    Only the transmission is stored; the loss rate is always ``1 - T``.
    """

    transmission: float

    def __post_init__(self):
        t = float(self.transmission)
        if not 0.0 <= t <= 1.0:
            raise DomainError(f"transmission must lie in [0, 1], got {t}")
        object.__setattr__(self, "transmission", t)

    @property
    def loss(self) -> float:
        return 1.0 - self.transmission

    @classmethod
    def from_transmission(cls, t: float) -> LossChannel:
        return cls(t)

    @classmethod
    def from_loss(cls, r: float) -> LossChannel:
        if not 0.0 <= r <= 1.0:
            raise DomainError(f"loss must lie in [0, 1], got {r}")
        return cls(1.0 - r)

    @classmethod
    def from_beam_splitter_angle(cls, theta: float) -> LossChannel:
        """Channel of a beam splitter with mixing angle ``theta``, T = cos^2(theta/2)."""
        return cls(math.cos(theta / 2.0) ** 2)


@dataclass(frozen=True)
class EcsSpec:
    """Entangled coherent state N(|a>_1 + |a>_2), parameterized by |a|^2.

    ``norm_sq`` is the squared normalization 1/[2(1+e^{-|a|^2})] and
    ``mean_photons`` the total mean photon number. Use
    :func:`ecs_from_alpha_sq` or :func:`ecs_from_mean_photons` to build one.
    """

    alpha_sq: float
    norm_sq: float
    mean_photons: float

    @property
    def alpha(self) -> float:
        return math.sqrt(self.alpha_sq)


def _norm_sq(alpha_sq: float) -> float:
    return 0.5 / (1.0 + math.exp(-alpha_sq))


def ecs_from_alpha_sq(alpha_sq: float) -> EcsSpec:
    if not alpha_sq >= 0:
        raise DomainError(f"alpha_sq must be non-negative, got {alpha_sq}")
    alpha_sq = float(alpha_sq)
    n2 = _norm_sq(alpha_sq)
    return EcsSpec(alpha_sq, n2, 2.0 * n2 * alpha_sq)


def ecs_from_mean_photons(n_bar: float, tol: float = 1e-12) -> EcsSpec:
    """Invert n = |a|^2/(1+e^{-|a|^2}) with |a|^2 = n + W0(n e^{-n})."""
    if not n_bar >= 0:
        raise DomainError(f"n_bar must be non-negative, got {n_bar}")
    n_bar = float(n_bar)
    alpha_sq = n_bar + lambert_w0(n_bar * math.exp(-n_bar), tol)
    return EcsSpec(alpha_sq, _norm_sq(alpha_sq), n_bar)


@dataclass(frozen=True)
class NoonSpec:
    photon_number: int

    def __post_init__(self):
        if int(self.photon_number) != self.photon_number or self.photon_number < 1:
            raise DomainError(f"photon_number must be a positive integer, got {self.photon_number}")
        object.__setattr__(self, "photon_number", int(self.photon_number))


@dataclass(frozen=True, eq=False)
class NoonSuperposition:
    """Coefficients c_n of sum_n c_n (|n>_1 + |n>_2)/sqrt(2).

    The n = 0 term is the two-mode vacuum itself, so ``c_0`` is its plain
    amplitude and normalization reads sum |c_n|^2 = 1.
    """

    coefficients: np.ndarray
    atol: float = field(default=1e-12, repr=False)

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex).ravel()
        if c.size == 0:
            raise DomainError("empty coefficient list")
        norm = float(np.sum(np.abs(c) ** 2))
        if abs(norm - 1.0) > self.atol:
            raise DomainError(f"coefficients not normalized: sum |c_n|^2 = {norm!r}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def normalized(cls, coefficients) -> NoonSuperposition:
        c = np.asarray(coefficients, dtype=complex).ravel()
        return cls(c / np.linalg.norm(c))

    @property
    def n_max(self) -> int:
        return self.coefficients.size - 1

    def moments(self) -> tuple[float, float]:
        """(<n>, <n^2>) of the total photon number."""
        p = np.abs(self.coefficients) ** 2
        n = np.arange(p.size)
        return float(p @ n), float(p @ n**2)

    @property
    def mean_photons(self) -> float:
        return self.moments()[0]


class GeneratorKind(enum.Enum):
    """Phase-shift generator: n_2, or (n_2 - n_1)/2."""

    MODE_TWO_NUMBER = "n2"
    HALF_DIFFERENCE = "halfdiff"


@dataclass(frozen=True)
class QfiBreakdown:
    """Total QFI with whichever decompositions the producer knows.

    ``classical_term``/``heisenberg_term`` split the exact ECS result into
    its 2nT-scaling and (nT)^2-scaling parts. The three ``term_*`` fields
    are the eigen-subset decomposition: classical Fisher information of the
    weights, weighted pure-state QFIs, and the subtracted coupling.
    """

    total: float
    classical_term: float | None = None
    heisenberg_term: float | None = None
    term_classical_fisher: float | None = None
    term_weighted_pure: float | None = None
    term_coupling: float | None = None

    def __post_init__(self):
        if self.total < 0 or math.isnan(self.total):
            raise DomainError(f"QFI must be non-negative, got {self.total}")
        scale = max(1.0, abs(self.total))
        if self.classical_term is not None and self.heisenberg_term is not None:
            if abs(self.classical_term + self.heisenberg_term - self.total) > 1e-9 * scale:
                raise DomainError("classical + Heisenberg terms do not sum to total")
        parts = (self.term_classical_fisher, self.term_weighted_pure, self.term_coupling)
        if None not in parts:
            t1, t2, t3 = parts
            if abs(t1 + t2 - t3 - self.total) > 1e-9 * scale:
                raise DomainError("three-term decomposition does not sum to total")

    @property
    def delta_phi_min(self) -> float:
        """Quantum Cramer-Rao bound 1/sqrt(F_Q) for a single shot."""
        return delta_phi_min(self.total)


def delta_phi_min(qfi: float) -> float:
    return math.inf if qfi <= 0 else 1.0 / math.sqrt(qfi)
