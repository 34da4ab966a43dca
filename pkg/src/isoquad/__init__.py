"""Discrete elliptic operators on a five-parameter quadrilateral family.

The package builds 4x4 finite-difference and degree-3 collocation operators
for the Dirichlet problem pulled back from a quadrilateral onto the unit
square, searches vertex neighborhoods for epsilon-isospectral domains, and
traces continuous one-parameter curves of isospectral quadrilaterals.
"""

from .discretization import (
    DiffMatrices,
    DiscreteOperator,
    Grid,
    LEGENDRE_KAPPA,
    UNIFORM_KAPPA,
    assemble,
    build_grid,
    fd_matrices,
    lagrange_derivatives,
    operator_from_vertices,
    spectral_matrices,
)
from .continuation import (
    CurvePoint,
    DeformationStep,
    SingularityReport,
    TraceConfig,
    TraceResult,
    deformation_study,
    diagnose_singularity,
    eigen_derivatives_fd,
    residuals,
    tangent_exact,
    trace_curve,
    trace_exact,
    trace_fd,
)
from .dual import DualScalar
from .errors import (
    BifurcationDetected,
    ComplexSpectrum,
    DegenerateJacobian,
    InvalidQuadrilateral,
    InvalidStep,
    IsoquadError,
    KappaOutOfRange,
    NonPositiveFactor,
)
from .geometry import (
    CoefficientBundle,
    Quadrilateral,
    UNIT_SQUARE,
    area,
    coefficients,
    is_valid,
    jacobian_det,
    map_point,
    perimeter,
    scale,
    validate,
)
from .search import (
    Candidate,
    SearchConfig,
    SearchStats,
    enumerate_hrange,
    epsilon_error,
    run_search,
)
from .spectra import (
    Spectrum,
    charpoly_invariants,
    charpoly_with_gradient,
    continuous_square_eigenvalues,
    eigenvalues,
    full_spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "BifurcationDetected",
    "Candidate",
    "CoefficientBundle",
    "ComplexSpectrum",
    "CurvePoint",
    "DeformationStep",
    "DegenerateJacobian",
    "DiffMatrices",
    "DiscreteOperator",
    "DualScalar",
    "Grid",
    "InvalidQuadrilateral",
    "InvalidStep",
    "IsoquadError",
    "KappaOutOfRange",
    "LEGENDRE_KAPPA",
    "NonPositiveFactor",
    "Quadrilateral",
    "SearchConfig",
    "SearchStats",
    "SingularityReport",
    "Spectrum",
    "TraceConfig",
    "TraceResult",
    "UNIFORM_KAPPA",
    "UNIT_SQUARE",
    "area",
    "assemble",
    "build_grid",
    "charpoly_invariants",
    "charpoly_with_gradient",
    "coefficients",
    "continuous_square_eigenvalues",
    "deformation_study",
    "diagnose_singularity",
    "eigen_derivatives_fd",
    "eigenvalues",
    "enumerate_hrange",
    "epsilon_error",
    "fd_matrices",
    "full_spectrum",
    "is_valid",
    "jacobian_det",
    "lagrange_derivatives",
    "map_point",
    "operator_from_vertices",
    "perimeter",
    "residuals",
    "run_search",
    "scale",
    "spectral_matrices",
    "tangent_exact",
    "trace_curve",
    "trace_exact",
    "trace_fd",
    "validate",
]
