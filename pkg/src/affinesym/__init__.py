"""affinesym: numerical workbench for equiaffine hypersurface geometry.

Computes Blaschke invariants (affine metric, affine normal, shape operator,
difference tensor, Pick invariant) of parametric hypersurfaces, verifies the
integrability equations as numerical residuals, classifies the pointwise
SO(2) / Z3 symmetry of 3-dimensional positive definite hypersurfaces, builds
the three warped-product families over 2-dimensional affine spheres, and
integrates the scalar structure ODEs with their first integrals.

Served either as a library, through the CLI (`affinesym --help`), or as a
FastAPI service (`affinesym serve`).
"""

__version__ = "0.1.0"

from .blaschke import (
    BlaschkeData,
    affine_metric,
    blaschke_normal,
    blaschke_point,
    difference_tensor,
    shape_operator,
)
from .catalog import AffineSphereSpec, CurveSpec, sphere_catalog, surface3_catalog
from .eig3 import sym_eig3
from .errors import (
    AmbiguousAxis,
    BlowUp,
    DegenerateSurface,
    FrameNotDifferentiable,
    GeometryError,
    InadmissibleCurve,
    IndefiniteMetric,
    KindMismatch,
    OrderUnsupported,
    ParamsOutOfRange,
    PointOutsideChart,
    TangentDecompositionFailure,
    UnknownSurface,
)
from .families import FamilySpec, build_family, roundtrip_verify
from .flow import (
    StructureState,
    Trajectory,
    first_integral_check,
    flow_integrate,
    match_surface,
    trace_symmetry_line,
)
from .jets import ImmersionSpec, Jet, immersion_from_exprs, jet_eval
from .residuals import ResidualReport, structure_residuals
from .symmetry import (
    FamilyCase,
    SymmetryGroup,
    SymmetryReport,
    canonical_frame,
    classify_point,
    connection_scalars,
    nu_case,
    ricci_hat,
)

__all__ = [
    "__version__",
    "AffineSphereSpec",
    "AmbiguousAxis",
    "BlaschkeData",
    "BlowUp",
    "CurveSpec",
    "DegenerateSurface",
    "FamilyCase",
    "FamilySpec",
    "FrameNotDifferentiable",
    "GeometryError",
    "ImmersionSpec",
    "InadmissibleCurve",
    "IndefiniteMetric",
    "Jet",
    "KindMismatch",
    "OrderUnsupported",
    "ParamsOutOfRange",
    "PointOutsideChart",
    "ResidualReport",
    "StructureState",
    "SymmetryGroup",
    "SymmetryReport",
    "TangentDecompositionFailure",
    "Trajectory",
    "UnknownSurface",
    "affine_metric",
    "blaschke_normal",
    "blaschke_point",
    "build_family",
    "canonical_frame",
    "classify_point",
    "connection_scalars",
    "difference_tensor",
    "first_integral_check",
    "flow_integrate",
    "immersion_from_exprs",
    "jet_eval",
    "match_surface",
    "nu_case",
    "ricci_hat",
    "roundtrip_verify",
    "shape_operator",
    "sphere_catalog",
    "structure_residuals",
    "surface3_catalog",
    "sym_eig3",
    "trace_symmetry_line",
]
