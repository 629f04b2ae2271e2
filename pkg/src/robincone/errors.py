"""Exception hierarchy for the robincone toolkit.

Errors are grouped by pipeline stage so the CLI can map them onto its
stable exit codes: geometry errors -> 2, precondition errors -> 3,
budget errors -> 4, solver errors -> 5.
"""


class RobinConeError(Exception):
    """Base class for all toolkit errors."""


# --- geometry -------------------------------------------------------------

class GeometryError(RobinConeError):
    """Invalid or unsupported geometric input."""


class NotOnSphere(GeometryError):
    """Curve samples deviate from the unit sphere beyond tolerance."""


class NonSimpleCurve(GeometryError):
    """Self-intersection detected on the sample grid."""


class IndeterminateSign(GeometryError):
    """Curvature maximum falls inside the numerical dead band around zero."""


class UnsupportedGeometry(GeometryError):
    """Geometry outside the classifier's domain of validity."""


class DegenerateRadius(GeometryError):
    """Nonpositive radius where a positive one is required."""


# --- meshing --------------------------------------------------------------

class MeshingError(RobinConeError):
    """Mesh construction failed."""


class MeshQualityFailure(MeshingError):
    """A triangle exceeds the allowed aspect ratio."""


class NotAxisymmetric(MeshingError):
    """Meridian meshing requires a latitude-circle cross-section."""


# --- assembly / linear algebra --------------------------------------------

class SolverError(RobinConeError):
    """Numerical linear algebra failure."""


class SingularElement(SolverError):
    """Zero-area triangle encountered during assembly."""


class AxisSingularity(SolverError):
    """Azimuthal mode m >= 1 assembled without axis elimination."""


class ZeroVector(SolverError):
    """Rayleigh quotient of the zero vector requested."""


class FactorizationBreakdown(SolverError):
    """LDL^T pivot fell below the breakdown threshold (after retry)."""


class ConvergenceFailure(SolverError):
    """Iterative eigensolver did not converge within its budget."""


class FitDegenerate(SolverError):
    """Too few converged sweep points for a least-squares fit."""


# --- certificates ----------------------------------------------------------

class PreconditionError(RobinConeError):
    """A documented operation precondition does not hold."""


class CurvatureNotPositive(PreconditionError):
    """No boundary point with strictly positive geodesic curvature."""


class RegimeError(PreconditionError):
    """1D Robin-Dirichlet problem has no negative eigenvalue (R*alpha*delta <= 1)."""


class OutOfChart(PreconditionError):
    """Tubular coordinates evaluated outside their validity range."""


class QuadratureNonConvergence(SolverError):
    """Two quadrature orders disagree beyond the acceptance tolerance."""


class RBudgetExceeded(RobinConeError):
    """Dilation escalation hit R_max without certifying the family."""


# --- configuration ----------------------------------------------------------

class ConfigError(RobinConeError):
    """Malformed or inconsistent run configuration."""
