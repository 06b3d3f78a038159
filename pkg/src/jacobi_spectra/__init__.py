"""Spectra of the area Jacobi operator on model holomorphic curves.

The package assembles the normal-bundle stability operator of closed-form
holomorphic curves in constant-curvature Kahler surfaces (projective plane,
sphere products, flat torus quotients) as a discrete Hermitian eigenproblem,
computes spectra, and verifies eigenvalue bounds, equality cases, dimension
formulas, and the supporting pointwise/integral identities.
"""

__version__ = "0.1.0"

from .ambient import AmbientKind, AmbientSpace, build_ambient
from .calculus import (
    QuadraticFormValue,
    WeightedSection,
    d1,
    d1bar,
    inner_product,
    jacobi_apply,
    normal_section,
    random_normal_section,
    ricci_identity_residual,
    second_variation_area,
    second_variation_wplus,
    wplus_identity_check,
)
from .curves import Chart, CurveName, CurveSpec, catalog_names, catalog_spec
from .errors import (
    ChartOverflow,
    CutoffTooSmall,
    DegenerateLattice,
    FrameDiscontinuity,
    GramIllConditioned,
    HypothesisViolation,
    InapplicableCheck,
    IncompatibleSpin,
    JacobiSpectraError,
    NonConvergence,
    NonIntegralChernNumber,
    NonPositiveCurvature,
    NotEinstein,
    UnstableKernel,
    UnsupportedGenus,
    UsageError,
    WeightMismatch,
    WeightOverflow,
)
from .geometry import (
    CurveGeometry,
    QuadratureGrid,
    build_geometry,
    curvatures,
    latitude_holonomies,
    normal_connection,
    normal_winding_number,
    topological_invariants,
)
from .spectral import (
    BasisBackend,
    ConvergenceStudy,
    OperatorKind,
    OperatorMatrix,
    SectionBasis,
    SpectrumReport,
    assemble,
    build_basis,
    convergence_study,
    eigensolve,
)
from .theorems import (
    CheckResult,
    RiemannRochLedger,
    VerificationReport,
    build_ledger,
    h0_line_bundle,
    run_curve_verification,
    verify_claim1,
    verify_claim2,
    verify_theorem1,
    verify_theorem2,
)

__all__ = [
    "__version__",
    "AmbientKind",
    "AmbientSpace",
    "build_ambient",
    "Chart",
    "CurveName",
    "CurveSpec",
    "catalog_names",
    "catalog_spec",
    "CurveGeometry",
    "QuadratureGrid",
    "build_geometry",
    "curvatures",
    "latitude_holonomies",
    "normal_connection",
    "normal_winding_number",
    "topological_invariants",
    "WeightedSection",
    "QuadraticFormValue",
    "normal_section",
    "random_normal_section",
    "inner_product",
    "d1",
    "d1bar",
    "jacobi_apply",
    "second_variation_area",
    "second_variation_wplus",
    "ricci_identity_residual",
    "wplus_identity_check",
    "BasisBackend",
    "OperatorKind",
    "SectionBasis",
    "OperatorMatrix",
    "SpectrumReport",
    "ConvergenceStudy",
    "build_basis",
    "assemble",
    "eigensolve",
    "convergence_study",
    "CheckResult",
    "VerificationReport",
    "RiemannRochLedger",
    "h0_line_bundle",
    "build_ledger",
    "verify_theorem1",
    "verify_theorem2",
    "verify_claim1",
    "verify_claim2",
    "run_curve_verification",
    "JacobiSpectraError",
    "UsageError",
    "NonPositiveCurvature",
    "DegenerateLattice",
    "UnsupportedGenus",
    "ChartOverflow",
    "NonIntegralChernNumber",
    "IncompatibleSpin",
    "WeightOverflow",
    "CutoffTooSmall",
    "GramIllConditioned",
    "NonConvergence",
    "UnstableKernel",
    "NotEinstein",
    "HypothesisViolation",
    "WeightMismatch",
    "FrameDiscontinuity",
    "InapplicableCheck",
]
