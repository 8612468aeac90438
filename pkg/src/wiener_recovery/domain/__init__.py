"""Domain layer: function classes, sampling, ℓ1 decoding and lower bounds."""

from .errors import (
    CardinalityCapError,
    DimensionMismatchError,
    InfeasiblePointError,
    InvalidProblemError,
    NumericalFailureError,
    RecoveryError,
    UnsupportedClassError,
)
from .lowerbound import (
    curse_demo,
    gluskin_bound,
    linear_reconstruction,
    random_rank_matrix,
    worst_case_l1ball_error,
)
from .models import (
    BpdnProblem,
    ClassBoundReport,
    ClassSpec,
    ClassVariant,
    CoefficientVector,
    EtaMode,
    HoelderConstants,
    IndexSet,
    LinearAlgorithmMatrix,
    LpError,
    MeasurementMatrix,
    MembershipReport,
    PointSet,
    QuadratureConfig,
    RecoveryPlan,
    RecoveryReport,
    SeparationReport,
    SolverConfig,
    SolverResult,
    SolverStatus,
)
from .multiindex import cube_index_set, index_set_from, position_of
from .protocols import BpdnSolver, GroundTruthGenerator
from .recovery import (
    PlantedSparseGenerator,
    error_bound_rhs,
    fixed_plan,
    lp_error,
    plan_parameters,
    recover,
)
from .sampling import draw_uniform, evaluate, measurement_matrix
from .solver import PrimalDualSolver, certificate_gap, least_squares, solve_bpdn
from .wiener import (
    ClassMemberGenerator,
    class_weight,
    membership,
    plan_truncation,
    project,
    projection_error_bound,
    random_member,
    sigma_s,
    tail_wiener_norm,
    wiener_norm,
)

__all__ = [
    # Errors
    "CardinalityCapError",
    "DimensionMismatchError",
    "InfeasiblePointError",
    "InvalidProblemError",
    "NumericalFailureError",
    "RecoveryError",
    "UnsupportedClassError",
    # Models
    "BpdnProblem",
    "ClassBoundReport",
    "ClassSpec",
    "ClassVariant",
    "CoefficientVector",
    "EtaMode",
    "HoelderConstants",
    "IndexSet",
    "LinearAlgorithmMatrix",
    "LpError",
    "MeasurementMatrix",
    "MembershipReport",
    "PointSet",
    "QuadratureConfig",
    "RecoveryPlan",
    "RecoveryReport",
    "SeparationReport",
    "SolverConfig",
    "SolverResult",
    "SolverStatus",
    # Protocols
    "BpdnSolver",
    "GroundTruthGenerator",
    # Services
    "ClassMemberGenerator",
    "PlantedSparseGenerator",
    "PrimalDualSolver",
    "certificate_gap",
    "class_weight",
    "cube_index_set",
    "curse_demo",
    "draw_uniform",
    "error_bound_rhs",
    "evaluate",
    "fixed_plan",
    "gluskin_bound",
    "index_set_from",
    "least_squares",
    "linear_reconstruction",
    "lp_error",
    "measurement_matrix",
    "membership",
    "plan_parameters",
    "plan_truncation",
    "position_of",
    "project",
    "projection_error_bound",
    "random_member",
    "random_rank_matrix",
    "recover",
    "sigma_s",
    "solve_bpdn",
    "tail_wiener_norm",
    "wiener_norm",
    "worst_case_l1ball_error",
]
