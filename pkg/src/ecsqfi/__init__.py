"""Quantum Fisher information of entangled coherent and NOON states under photon loss."""

__version__ = "0.1.0"

from .closed_forms import (
    ecs_lossless_qfi,
    ecs_lossy_qfi,
    ecs_lossy_qfi_approx,
    ecs_spectral_data,
    noon_optimal_n,
    noon_qfi,
)
from .crossover import CrossoverMode, critical_point, crossover_roots, fitted_boundaries
from .model import (
    EcsSpec,
    GeneratorKind,
    LossChannel,
    NoonSpec,
    NoonSuperposition,
    QfiBreakdown,
    ecs_from_alpha_sq,
    ecs_from_mean_photons,
)
from .qfi import qfi_spectral, qfi_three_term

__all__ = [
    "CrossoverMode",
    "EcsSpec",
    "GeneratorKind",
    "LossChannel",
    "NoonSpec",
    "NoonSuperposition",
    "QfiBreakdown",
    "critical_point",
    "crossover_roots",
    "ecs_from_alpha_sq",
    "ecs_from_mean_photons",
    "ecs_lossless_qfi",
    "ecs_lossy_qfi",
    "ecs_lossy_qfi_approx",
    "ecs_spectral_data",
    "fitted_boundaries",
    "noon_optimal_n",
    "noon_qfi",
    "qfi_spectral",
    "qfi_three_term",
]
