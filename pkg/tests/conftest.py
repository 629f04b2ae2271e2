"""Shared fixtures and independent integration oracles.

The expensive benchmark computations (quadrant eigensolve, truncation-radius
sweeps on the circular cones) run once per session and are shared between
the acceptance suite and the unit tests that assert the same invariants.
"""

import numpy as np
import pytest

from robincone.geometry import ConeSpec, Interval2D, LatitudeCircle
from robincone.meshing import DomainSpec, build_meridian_mesh, build_planar_mesh
from robincone.fem import assemble_axisymmetric, assemble_planar
from robincone.eigen import bracket, count_below, spectral_report
from robincone.fdcheck import fd_meridian_forms


# ---------------------------------------------------------------------------
# independent brute-force element integration (degree-4 rule)
# ---------------------------------------------------------------------------

TRI_W = np.array([0.223381589678011] * 3 + [0.109951743655322] * 3)
TRI_A = 0.445948490915965
TRI_B = 0.091576213509771
TRI_BARY = np.array(
    [
        [1 - 2 * TRI_A, TRI_A, TRI_A],
        [TRI_A, 1 - 2 * TRI_A, TRI_A],
        [TRI_A, TRI_A, 1 - 2 * TRI_A],
        [1 - 2 * TRI_B, TRI_B, TRI_B],
        [TRI_B, 1 - 2 * TRI_B, TRI_B],
        [TRI_B, TRI_B, 1 - 2 * TRI_B],
    ]
)


def quad_triangle(vertices, f):
    """Integrate f(x, y) over one triangle, exact through degree 4.

    The six weights sum to one, so the rule integrates as area times the
    weighted average of the integrand.
    """
    v = np.asarray(vertices, dtype=float)
    area = 0.5 * abs(
        (v[1, 0] - v[0, 0]) * (v[2, 1] - v[0, 1])
        - (v[2, 0] - v[0, 0]) * (v[1, 1] - v[0, 1])
    )
    pts = TRI_BARY @ v
    return area * np.sum(TRI_W * f(pts[:, 0], pts[:, 1]))


def quad_edge(p0, p1, f, order=6):
    """Integrate f(x, y) along the segment p0-p1 (Gauss-Legendre)."""
    x0, w0 = np.polynomial.legendre.leggauss(order)
    t = 0.5 * (x0 + 1.0)
    pts = np.outer(1 - t, p0) + np.outer(t, p1)
    L = np.linalg.norm(np.asarray(p1) - np.asarray(p0))
    return 0.5 * L * np.sum(w0 * f(pts[:, 0], pts[:, 1]))


def hat_functions(vertices):
    """P1 hat functions and gradients on a triangle, as callables."""
    v = np.asarray(vertices, dtype=float)
    T = np.column_stack([v[1] - v[0], v[2] - v[0]])
    Tinv = np.linalg.inv(T)

    def lam(i):
        def f(x, y):
            xy = np.stack([x - v[0, 0], y - v[0, 1]], axis=-1)
            ref = xy @ Tinv.T
            l1, l2 = ref[..., 0], ref[..., 1]
            return [1 - l1 - l2, l1, l2][i]

        return f

    grads = np.zeros((3, 2))
    grads[1] = Tinv.T @ np.array([1.0, 0.0])
    grads[2] = Tinv.T @ np.array([0.0, 1.0])
    grads[0] = -grads[1] - grads[2]
    return lam, grads


# ---------------------------------------------------------------------------
# session-scoped benchmark fixtures
# ---------------------------------------------------------------------------

@pytest.fixture(scope="session")
def quadrant_benchmark():
    """Quadrant at alpha=1, R_T=12, h=0.05: mesh, forms, report, runtime."""
    import time

    t0 = time.time()
    spec = DomainSpec(ConeSpec(Interval2D(np.pi / 4)), 12.0, 1.0)
    mesh = build_planar_mesh(spec, h=0.05, bisector_angle=np.pi / 4)
    forms = assemble_planar(mesh, 1.0, "dirichlet")
    report = spectral_report(forms, {"h": 0.05, "R_T": 12.0, "bc": "dirichlet"})
    elapsed = time.time() - t0
    return mesh, forms, report, elapsed


@pytest.fixture(scope="session")
def sharp_cone_counts():
    """Dirichlet (and partial Neumann) counts below -1.001, theta0 = pi/4."""
    shift = -1.001
    counts = {}
    for R_T in (10.0, 20.0, 40.0):
        spec = DomainSpec(ConeSpec(LatitudeCircle(np.pi / 4)), R_T, 1.0)
        mesh = build_meridian_mesh(spec, h=0.1)
        counts[R_T] = bracket(spec, mesh, 1.0, shift, mode=0)
    spec = DomainSpec(ConeSpec(LatitudeCircle(np.pi / 4)), 80.0, 1.0)
    mesh = build_meridian_mesh(spec, h=0.1)
    forms = assemble_axisymmetric(mesh, 1.0, 0, "dirichlet")
    counts[80.0] = (None, count_below(forms, shift))
    return counts


@pytest.fixture(scope="session")
def wide_cone_counts():
    """Dirichlet counts below -1.001 for theta0 = 2*pi/3, modes 0..2."""
    shift = -1.001
    out = {}
    for R_T in (10.0, 20.0, 40.0):
        spec = DomainSpec(ConeSpec(LatitudeCircle(2 * np.pi / 3)), R_T, 1.0)
        mesh = build_meridian_mesh(spec, h=0.1)
        for m in (0, 1, 2):
            forms = assemble_axisymmetric(mesh, 1.0, m, "dirichlet")
            out[(R_T, m)] = count_below(forms, shift)
    return out


@pytest.fixture(scope="session")
def fd_sharp_count_20():
    """Finite-volume count below -1.001 at R_T=20 for theta0 = pi/4."""
    forms = fd_meridian_forms(np.pi / 4, 1.0, 20.0, n_rho=400, n_psi=160)
    return count_below(forms, -1.001)
