"""Exception hierarchy for the geometry pipeline.

Every failure mode that callers are expected to catch has its own class so
that the CLI and the HTTP service can map them to exit codes / error payloads
without string matching.
"""


class GeometryError(Exception):
    """Base class for all numerical / geometric failures."""


class PointOutsideChart(GeometryError):
    """Requested point lies outside the chart box of the immersion."""


class OrderUnsupported(GeometryError):
    """Jet order above the supported maximum (4) was requested."""


class DegenerateSurface(GeometryError):
    """Second fundamental form is singular at the point."""

    def __init__(self, msg, point=None):
        super().__init__(msg)
        self.point = point


class IndefiniteMetric(GeometryError):
    """Second fundamental form has mixed signature (not handled here)."""

    def __init__(self, msg, point=None):
        super().__init__(msg)
        self.point = point


class TangentDecompositionFailure(GeometryError):
    """Tangent basis + transversal too ill-conditioned to decompose against."""


class AmbiguousAxis(GeometryError):
    """Neither the Ricci operator nor the shape operator isolates an axis."""


class FrameNotDifferentiable(GeometryError):
    """Canonical frame jumps between neighbouring samples beyond the gauge."""


class KindMismatch(GeometryError):
    """Affine-sphere kind incompatible with the requested family case."""


class InadmissibleCurve(GeometryError):
    """Nondegeneracy product of the profile curve vanishes on t_range."""

    def __init__(self, msg, t=None):
        super().__init__(msg)
        self.t = t


class UnknownSurface(GeometryError):
    """Catalog name not recognised."""


class ParamsOutOfRange(GeometryError):
    """Catalog parameters outside their documented ranges."""


class BlowUp(GeometryError):
    """ODE state escaped the finite guard during integration."""

    def __init__(self, msg, t=None):
        super().__init__(msg)
        self.t = t
