"""Nonlinear sampling recovery of multivariate periodic functions by ℓ1 decoding."""

from .domain import (
    ClassSpec,
    ClassVariant,
    CoefficientVector,
    EtaMode,
    IndexSet,
    RecoveryPlan,
    RecoveryReport,
    SolverConfig,
    plan_parameters,
    recover,
    solve_bpdn,
)

__version__ = "0.1.0"

__all__ = [
    "ClassSpec",
    "ClassVariant",
    "CoefficientVector",
    "EtaMode",
    "IndexSet",
    "RecoveryPlan",
    "RecoveryReport",
    "SolverConfig",
    "__version__",
    "plan_parameters",
    "recover",
    "solve_bpdn",
]
