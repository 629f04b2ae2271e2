import numpy as np
import pytest
import scipy.linalg as sla

from conftest import hat_functions, quad_edge, quad_triangle
from robincone.errors import AxisSingularity, ZeroVector
from robincone.geometry import ConeSpec, Interval2D, LatitudeCircle
from robincone.meshing import (
    DomainSpec,
    Mesh,
    Tag,
    build_meridian_mesh,
    build_planar_mesh,
    refine_uniform,
)
from robincone.fem import (
    assemble_axisymmetric,
    assemble_planar,
    interpolate,
    rayleigh_quotient,
    save_matrix_market,
)


def toy_mesh(meridian=False, shift_x=0.0):
    """Five-node, four-triangle fan; all boundary edges Robin."""
    nodes = np.array(
        [[0.3, 0.0], [1.3, 0.1], [1.1, 0.9], [0.2, 1.0], [0.7, 0.45]]
    )
    nodes[:, 0] += shift_x
    tris = np.array([[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]])
    edges = np.array([[0, 1], [1, 2], [2, 3], [3, 0]])
    tags = np.full(4, int(Tag.ROBIN), dtype=np.int8)
    return Mesh(nodes, tris, edges, tags, 1.0, {}, meridian=meridian)


def dense_assembly_oracle(mesh, weight):
    """Brute-force A, B, M by independent quadrature (degree-4 exact)."""
    n = mesh.n_nodes
    A = np.zeros((n, n))
    M = np.zeros((n, n))
    B = np.zeros((n, n))
    for tri in mesh.triangles:
        v = mesh.nodes[tri]
        lam, grads = hat_functions(v)
        for a in range(3):
            for b in range(3):
                ga, gb = grads[a], grads[b]
                A[tri[a], tri[b]] += quad_triangle(
                    v, lambda x, y: (ga @ gb) * weight(x, y)
                )
                M[tri[a], tri[b]] += quad_triangle(
                    v, lambda x, y, fa=lam(a), fb=lam(b): fa(x, y) * fb(x, y) * weight(x, y)
                )
    for (i, j), tag in zip(mesh.boundary_edges, mesh.edge_tags):
        if tag != int(Tag.ROBIN):
            continue
        p0, p1 = mesh.nodes[i], mesh.nodes[j]
        L = np.linalg.norm(p1 - p0)

        def hat(k):
            def f(x, y):
                t = np.hypot(x - p0[0], y - p0[1]) / L
                return 1 - t if k == 0 else t

            return f

        for a, ia in enumerate((i, j)):
            for b, ib in enumerate((i, j)):
                B[ia, ib] += quad_edge(
                    p0, p1, lambda x, y, fa=hat(a), fb=hat(b): fa(x, y) * fb(x, y) * weight(x, y)
                )
    return A, B, M


def test_unit_right_triangle_element_matrices():
    nodes = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    mesh = Mesh(
        nodes,
        np.array([[0, 1, 2]]),
        np.array([[0, 1]]),
        np.array([int(Tag.ROBIN)], dtype=np.int8),
        1.0,
        {},
    )
    forms = assemble_planar(mesh, 1.0, "neumann")
    expect_A = 0.5 * np.array([[2.0, -1.0, -1.0], [-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]])
    assert np.allclose(forms.A.toarray(), expect_A, atol=1e-14)
    # single Robin edge of length L: (L/6) [[2,1],[1,2]]
    expect_B = np.zeros((3, 3))
    expect_B[:2, :2] = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0
    assert np.allclose(forms.B.toarray(), expect_B, atol=1e-14)
    assert np.allclose(forms.M.toarray(), (np.ones((3, 3)) + np.eye(3)) / 24.0)


def test_planar_assembly_matches_brute_force_quadrature():
    mesh = toy_mesh()
    forms = assemble_planar(mesh, 1.0, "neumann")
    A, B, M = dense_assembly_oracle(mesh, lambda x, y: np.ones_like(x))
    assert np.max(np.abs(forms.A.toarray() - A)) < 1e-12
    assert np.max(np.abs(forms.B.toarray() - B)) < 1e-12
    assert np.max(np.abs(forms.M.toarray() - M)) < 1e-12


def test_axisymmetric_assembly_matches_brute_force_quadrature():
    mesh = toy_mesh(meridian=True, shift_x=0.5)  # away from the axis
    forms = assemble_axisymmetric(mesh, 1.0, 0, "neumann")
    A, B, M = dense_assembly_oracle(mesh, lambda x, y: x)
    assert np.max(np.abs(forms.A.toarray() - A)) < 1e-12
    assert np.max(np.abs(forms.B.toarray() - B)) < 1e-12
    assert np.max(np.abs(forms.M.toarray() - M)) < 1e-12


def test_symmetry_and_definiteness():
    mesh = build_planar_mesh(
        DomainSpec(ConeSpec(Interval2D(np.pi / 4)), 6.0, 1.0), h=0.4
    )
    forms = assemble_planar(mesh, 1.0, "dirichlet")
    for mat, psd in ((forms.A, True), (forms.B, True), (forms.M, True)):
        dense = mat.toarray()
        assert np.array_equal(dense, dense.T)  # symmetric exactly
        w = np.linalg.eigvalsh(dense)
        if psd:
            assert w.min() > -1e-10
    # M positive definite
    assert np.linalg.eigvalsh(forms.M.toarray()).min() > 0
    # B rank equals the number of Robin nodes in the dof space
    robin_nodes = np.unique(
        mesh.boundary_edges[mesh.edge_tags == int(Tag.ROBIN)]
    )
    robin_dofs = forms.dof_map[robin_nodes]
    expected_rank = int(np.sum(robin_dofs >= 0))
    rank = np.linalg.matrix_rank(forms.B.toarray(), tol=1e-10)
    assert rank == expected_rank


def test_constant_vector_identities():
    spec = DomainSpec(
        ConeSpec(Interval2D(np.pi / 4)), 12.0, 1.0, artificial_bc="neumann"
    )
    mesh = build_planar_mesh(spec, h=0.2, bisector_angle=np.pi / 4)
    forms = assemble_planar(mesh, 1.0, "neumann")
    one = np.ones(forms.n_dofs)
    assert one @ forms.A.matvec(one) == pytest.approx(0.0, abs=1e-10)
    assert one @ forms.M.matvec(one) == pytest.approx(
        mesh.triangle_areas().sum(), rel=1e-12
    )
    assert one @ forms.B.matvec(one) == pytest.approx(24.0, rel=1e-12)
    # constant-vector quotient: -alpha len(Robin)/area
    q = rayleigh_quotient(forms, one)
    assert q == pytest.approx(-24.0 / mesh.triangle_areas().sum(), rel=1e-12)
    assert q < 0


def test_axisymmetric_volume_identity():
    spec = DomainSpec(
        ConeSpec(LatitudeCircle(np.pi / 4)), 10.0, 1.0, artificial_bc="neumann"
    )
    mesh = build_meridian_mesh(spec, h=0.1)
    forms = assemble_axisymmetric(mesh, 1.0, 0, "neumann")
    one = np.ones(forms.n_dofs)
    volume = 2 * np.pi / 3 * 1000.0 * (1 - np.cos(np.pi / 4))
    assert one @ forms.M.matvec(one) == pytest.approx(volume / (2 * np.pi), rel=2e-3)
    assert one @ forms.A.matvec(one) == pytest.approx(0.0, abs=1e-9)


def test_quadrant_interpolated_ground_state(quadrant_benchmark):
    mesh, forms, _, _ = quadrant_benchmark
    x = interpolate(mesh, forms, lambda X, Y: np.exp(-(X + Y)))
    q = rayleigh_quotient(forms, x)
    assert -2.0 <= q <= -1.95


def test_quotient_monotone_in_alpha():
    mesh = build_planar_mesh(
        DomainSpec(ConeSpec(Interval2D(np.pi / 4)), 6.0, 1.0), h=0.3
    )
    rng = np.random.default_rng(5)
    f1 = assemble_planar(mesh, 1.0, "neumann")
    f2 = assemble_planar(mesh, 2.0, "neumann")
    for _ in range(5):
        x = rng.standard_normal(f1.n_dofs)
        if x @ f1.B.matvec(x) > 1e-12:
            assert rayleigh_quotient(f2, x) < rayleigh_quotient(f1, x)


def test_dirichlet_neumann_bracketing_eigenvalues():
    spec = DomainSpec(ConeSpec(Interval2D(np.pi / 4)), 6.0, 1.0)
    mesh = build_planar_mesh(spec, h=0.35)
    fd = assemble_planar(mesh, 1.0, "dirichlet")
    fn = assemble_planar(mesh, 1.0, "neumann")
    Kd = fd.pencil().toarray()
    Kn = fn.pencil().toarray()
    wd = sla.eigh(Kd, fd.M.toarray(), eigvals_only=True)
    wn = sla.eigh(Kn, fn.M.toarray(), eigvals_only=True)
    for k in range(len(wd)):
        assert wn[k] <= wd[k] + 1e-10


def test_galerkin_upper_bound_under_nested_refinement():
    spec = DomainSpec(ConeSpec(Interval2D(np.pi / 4)), 6.0, 1.0)
    coarse = build_planar_mesh(spec, h=0.5)
    fine = refine_uniform(coarse)
    wc = sla.eigh(
        assemble_planar(coarse, 1.0, "dirichlet").pencil().toarray(),
        assemble_planar(coarse, 1.0, "dirichlet").M.toarray(),
        eigvals_only=True,
    )
    ff = assemble_planar(fine, 1.0, "dirichlet")
    wf = sla.eigh(ff.pencil().toarray(), ff.M.toarray(), eigvals_only=True)
    for k in range(5):
        assert wf[k] <= wc[k] + 1e-10


def test_mode_elimination_and_errors():
    spec = DomainSpec(ConeSpec(LatitudeCircle(np.pi / 4)), 6.0, 1.0)
    mesh = build_meridian_mesh(spec, h=0.2)
    f0 = assemble_axisymmetric(mesh, 1.0, 0)
    f1 = assemble_axisymmetric(mesh, 1.0, 1)
    axis_nodes = np.unique(mesh.boundary_edges[mesh.edge_tags == int(Tag.AXIS)])
    assert np.all(f1.dof_map[axis_nodes] == -1)
    assert f1.n_dofs < f0.n_dofs
    with pytest.raises(AxisSingularity):
        assemble_axisymmetric(mesh, 1.0, 1, eliminate_axis=False)
    # the m^2/r^2 penalty raises every eigenvalue
    w0 = sla.eigh(f0.pencil().toarray(), f0.M.toarray(), eigvals_only=True)
    w1 = sla.eigh(f1.pencil().toarray(), f1.M.toarray(), eigvals_only=True)
    assert w1[0] > w0[0]


def test_zero_vector_rejected():
    mesh = toy_mesh()
    forms = assemble_planar(mesh, 1.0, "neumann")
    with pytest.raises(ZeroVector):
        rayleigh_quotient(forms, np.zeros(forms.n_dofs))


def test_singular_element_rejected():
    from robincone.errors import SingularElement

    nodes = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])  # collinear
    mesh = Mesh(
        nodes,
        np.array([[0, 1, 2]]),
        np.array([[0, 1]]),
        np.array([int(Tag.ROBIN)], dtype=np.int8),
        1.0,
        {},
    )
    with pytest.raises(SingularElement):
        assemble_planar(mesh, 1.0, "neumann")


def test_matrix_market_export(tmp_path):
    mesh = toy_mesh()
    forms = assemble_planar(mesh, 1.0, "neumann")
    path = tmp_path / "A.mtx"
    save_matrix_market(forms.A, str(path), comment="stiffness")
    import scipy.io

    back = scipy.io.mmread(str(path)).toarray()
    assert np.max(np.abs(back - forms.A.toarray())) < 1e-15
