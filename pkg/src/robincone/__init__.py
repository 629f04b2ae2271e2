"""Numerical and variational toolkit for Robin Laplacians on conical domains.

Classify the discrete spectrum below the essential threshold -alpha^2 from
boundary curvature, approximate it with graded finite elements and inertia
counts, and certify eigenvalue existence with explicit trial functions.
"""

from .errors import RobinConeError
from .geometry import (
    BoundaryCurve,
    ClassificationVerdict,
    ConeSpec,
    Interval2D,
    LatitudeCircle,
    SphericalGraph,
    Verdict,
    arclength_reparametrize,
    boundary_curve,
    classify,
    complement_is_convex,
    geodesic_curvature,
    mean_curvature,
)
from .meshing import (
    DomainSpec,
    Mesh,
    RadialBump,
    SmoothedVertex,
    Tag,
    build_meridian_mesh,
    build_planar_mesh,
    refine_uniform,
    save_vtk,
)
from .fem import (
    FormTriple,
    SparseSymmetric,
    assemble_axisymmetric,
    assemble_planar,
    rayleigh_quotient,
    save_matrix_market,
)
from .eigen import (
    BracketCounts,
    EigenSolveResult,
    SpectralReport,
    bracket,
    count_below,
    eigenpairs_below,
    spectral_report,
)
from .certify import (
    DisjointTrialFamily,
    QuasimodeResult,
    RobinDirichletEigen1D,
    TubularChart,
    build_trial_family,
    build_quasimode,
    cone_surface_chart,
    cross_rayleigh,
    halfline_inequality_check,
    solve_robin_dirichlet_1d,
    tubular_jacobian,
)
from .fdcheck import fd_meridian_forms

__version__ = "0.1.0"
