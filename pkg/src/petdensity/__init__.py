"""Pointwise density estimation from PET (Radon-transform) observations."""

from petdensity.errors import AssumptionViolated, DomainError, NumericalError
from petdensity.models import DensityModel, Observation, Sample, rho_d, sample_pet
from petdensity.kernel import KernelSpec, kernel_eval
from petdensity.estimator import (
    CutoffGrid,
    SelectionConfig,
    SelectionTrace,
    empirical_mu,
    estimate_point,
    grid_default,
    select_m,
)

__version__ = "0.1.0"

__all__ = [
    "AssumptionViolated",
    "CutoffGrid",
    "DensityModel",
    "DomainError",
    "KernelSpec",
    "NumericalError",
    "Observation",
    "Sample",
    "SelectionConfig",
    "SelectionTrace",
    "empirical_mu",
    "estimate_point",
    "grid_default",
    "kernel_eval",
    "rho_d",
    "sample_pet",
    "select_m",
]
