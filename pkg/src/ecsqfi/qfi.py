"""Mixed-state QFI engines and non-orthogonal-basis diagonalization."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .closed_forms import ecs_spectral_data
from .errors import CutoffError, DomainError, NumericalError
from .fock import (
    DEFAULT_TAIL_TOL,
    BranchBasis,
    LabeledDensityMatrix,
    choose_cutoff,
    coherent_amplitudes,
    poisson_tail,
)
from .model import EcsSpec, LossChannel, QfiBreakdown

DEFAULT_RANK_TOL = 1e-12
NEGATIVE_EIGENVALUE_FLOOR = -1e-10


@dataclass(frozen=True, eq=False)
class EigenSystem:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # columns
    rank_threshold: float

    @property
    def nonzero(self) -> np.ndarray:
        return self.eigenvalues > self.rank_threshold


def eigensystem(rho: LabeledDensityMatrix, rank_tol: float = DEFAULT_RANK_TOL) -> EigenSystem:
    """Dense Hermitian eigendecomposition with roundoff negatives clamped to zero."""
    try:
        vals, vecs = np.linalg.eigh(rho.rho)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    if vals[0] < NEGATIVE_EIGENVALUE_FLOOR:
        raise NumericalError(f"density matrix has eigenvalue {vals[0]!r} < {NEGATIVE_EIGENVALUE_FLOOR}")
    vals = np.clip(vals, 0.0, None)[::-1]
    vecs = vecs[:, ::-1]
    return EigenSystem(vals, vecs, rank_tol * rho.trace)


def qfi_spectral(rho: LabeledDensityMatrix, rank_tol: float = DEFAULT_RANK_TOL) -> float:
    """QFI from the full eigenbasis: sum over pairs of 2|<m|rho'|n>|^2 / (lambda_m + lambda_n).

    Pairs with lambda_m + lambda_n below ``rank_tol * trace`` are skipped.
    """
    if rho.drho_dphi is None:
        raise DomainError("density matrix carries no phi-derivative")
    es = eigensystem(rho, rank_tol)
    v = es.eigenvectors
    d = v.conj().T @ rho.drho_dphi @ v
    lam = es.eigenvalues
    denom = lam[:, None] + lam[None, :]
    keep = denom > es.rank_threshold
    total = np.sum(2.0 * np.abs(d[keep]) ** 2 / denom[keep])
    return float(total)


@dataclass(frozen=True, eq=False)
class EigenTrajectory:
    """Nonzero-weight eigenpairs and their phi-derivatives at one phase.

    Vectors are stored as columns over ``basis``. ``dropped`` counts the
    eigenvalues a producer discarded as zero.
    """

    basis: BranchBasis
    eigenvalues: np.ndarray
    eigenvalue_derivatives: np.ndarray
    eigenvectors: np.ndarray
    eigenvector_derivatives: np.ndarray
    dropped: int = 0


def qfi_three_term(
    traj: EigenTrajectory, rank_tol: float = DEFAULT_RANK_TOL, consistency_tol: float = 1e-8
) -> QfiBreakdown:
    """QFI from the nonzero-weight subset only.

    sum (lambda_i')^2/lambda_i + sum lambda_i F_i
    - sum_{i != j} 8 lambda_i lambda_j / (lambda_i + lambda_j) |<lambda_i'|lambda_j>|^2
    """
    lam = np.asarray(traj.eigenvalues, dtype=float)
    if lam.size == 0:
        raise DomainError("empty eigen-subset")
    if np.any(lam <= rank_tol):
        raise DomainError("eigen-subset contains a zero eigenvalue")
    dlam = np.asarray(traj.eigenvalue_derivatives, dtype=float)
    v = traj.eigenvectors
    dv = traj.eigenvector_derivatives
    # cross[i, j] = <lambda_i'|lambda_j>
    cross = dv.conj().T @ v
    if np.max(np.abs(cross + cross.conj().T)) > consistency_tol:
        raise DomainError("eigenvector derivatives do not preserve orthonormality")

    term1 = float(np.sum(dlam**2 / lam))
    self_norm = np.einsum("ki,ki->i", dv.conj(), dv).real
    f_each = 4.0 * (self_norm - np.abs(np.diag(cross)) ** 2)
    term2 = float(lam @ f_each)
    weight = 8.0 * np.outer(lam, lam) / (lam[:, None] + lam[None, :])
    np.fill_diagonal(weight, 0.0)
    term3 = float(np.sum(weight * np.abs(cross) ** 2))
    total = term1 + term2 - term3
    if total < 0 and total > -1e-12 * max(1.0, term2):
        total = 0.0
    return QfiBreakdown(
        total,
        term_classical_fisher=term1,
        term_weighted_pure=term2,
        term_coupling=term3,
    )


@dataclass(frozen=True, eq=False)
class GeneralizedEigen:
    eigenvalues: np.ndarray  # descending
    coefficients: np.ndarray  # columns, c^dagger A c = 1
    reduced: np.ndarray  # A^{-1} rho


def diagonalize_nonorthogonal(
    overlap: np.ndarray, rho_in_basis: np.ndarray, max_condition: float = 1e12
) -> GeneralizedEigen:
    """Solve rho c = lambda A c for a density operator known only on a non-orthogonal basis.

    Uses the Cholesky factor A = L L^dagger, so the Hermitian problem
    L^{-1} rho L^{-dagger} y = lambda y is diagonalized and c = L^{-dagger} y.
    """
    a = np.asarray(overlap, dtype=complex)
    rho = np.asarray(rho_in_basis, dtype=complex)
    if a.shape != rho.shape or a.shape[0] != a.shape[1]:
        raise DomainError("overlap and rho must be square matrices of equal size")
    if np.max(np.abs(a - a.conj().T)) > 1e-12:
        raise DomainError("Gram matrix is not Hermitian")
    cond = np.linalg.cond(a)
    if not cond < max_condition:
        raise NumericalError(f"Gram matrix ill-conditioned (cond={cond:.3g})")
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("Gram matrix is not positive definite") from exc
    linv_rho = np.linalg.solve(chol, rho)
    m = np.linalg.solve(chol, linv_rho.conj().T).conj().T
    m = 0.5 * (m + m.conj().T)
    vals, y = np.linalg.eigh(m)
    coeffs = np.linalg.solve(chol.conj().T, y)
    order = np.argsort(vals)[::-1]
    reduced = np.linalg.solve(a, rho)
    return GeneralizedEigen(vals[order], coeffs[:, order], reduced)


def ecs_analytic_eigensystem(
    spec: EcsSpec,
    channel: LossChannel,
    phi: float,
    n_max: int | None = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> EigenTrajectory:
    """Analytic eigenpairs of the lossy ECS state expanded in the branch basis.

    |lambda_+-> = eta_+-(+-|sqrt(T) a>_1 + |sqrt(T) a e^{i phi}>_2) with
    phi-independent weights; only the phase-carrying branch contributes to
    the derivative. Eigenvalues at or below ``rank_tol`` are dropped.
    """
    if n_max is None:
        n_max = choose_cutoff(spec.alpha_sq, tail_tol)
    t = channel.transmission
    tail = poisson_tail(t * spec.alpha_sq, n_max)
    if tail > tail_tol:
        raise CutoffError(f"cutoff n_max={n_max} leaves tail {tail:.3g} > {tail_tol:.3g}")
    basis = BranchBasis(n_max)
    n = np.arange(n_max + 1)
    u = coherent_amplitudes(math.sqrt(t) * spec.alpha, n_max)
    v = u * np.exp(1j * n * phi)
    e1 = basis.embed(u, 1)
    e2 = basis.embed(v, 2)
    de2 = basis.embed(1j * n * v, 2)

    sd = ecs_spectral_data(spec, channel)
    vals, vecs, dvecs = [], [], []
    dropped = 0
    for lam, eta_sq, sign in (
        (sd.lambda_plus, sd.eta_plus_sq, 1.0),
        (sd.lambda_minus, sd.eta_minus_sq, -1.0),
    ):
        if lam <= rank_tol or not math.isfinite(eta_sq):
            dropped += 1
            continue
        eta = math.sqrt(eta_sq)
        vals.append(lam)
        vecs.append(eta * (sign * e1 + e2))
        dvecs.append(eta * de2)
    return EigenTrajectory(
        basis,
        np.array(vals),
        np.zeros(len(vals)),
        np.column_stack(vecs),
        np.column_stack(dvecs),
        dropped,
    )


def ecs_branch_gram_and_rho(
    rho: LabeledDensityMatrix, spec: EcsSpec, channel: LossChannel, phi: float
) -> tuple[np.ndarray, np.ndarray]:
    """Gram and rho matrices of the two damped ECS branches, taken from a Fock-space rho."""
    basis = rho.basis
    n = np.arange(basis.n_max + 1)
    u = coherent_amplitudes(math.sqrt(channel.transmission) * spec.alpha, basis.n_max)
    phis = np.column_stack([basis.embed(u, 1), basis.embed(u * np.exp(1j * n * phi), 2)])
    return phis.conj().T @ phis, phis.conj().T @ rho.rho @ phis
