"""P1 finite-element assembly of the Robin quadratic form.

Three symmetric matrices realize the form on a tagged mesh:

    A  stiffness       int grad(u).grad(v) dx
    B  boundary mass   int u v dsigma        (Robin edges only)
    M  volume mass     int u v dx

so eigenvalues of the pencil (A - alpha B) x = lambda M x approximate the
min-max values of the continuous form.  Planar elements are integrated in
closed form (no quadrature error); axisymmetric assembly weights all
integrals by the distance to the axis and decomposes by azimuthal mode m,
adding the m^2/r^2 penalty term integrated with a 3-point mid-edge rule.

Dirichlet treatment of the artificial (truncation) boundary removes those
degrees of freedom, giving upper min-max bounds; the Neumann variant keeps
them, giving lower bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .errors import AxisSingularity, SingularElement, ZeroVector
from .meshing import Mesh, Tag


# ---------------------------------------------------------------------------
# symmetric sparse storage (lower triangle only)
# ---------------------------------------------------------------------------

class SparseSymmetric:
    """Symmetric sparse matrix stored as its lower triangle.

    Symmetry is exact by construction: only entries with row >= col are
    kept, and the full matrix is synthesized on demand.
    """

    def __init__(self, lower: sp.csr_matrix, n: int):
        self.lower = lower
        self.n = n
        self._full = None

    @classmethod
    def from_triplets(cls, rows, cols, vals, n) -> "SparseSymmetric":
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=float)
        swap = cols > rows
        r = np.where(swap, cols, rows)
        c = np.where(swap, rows, cols)
        mat = sp.coo_matrix((vals, (r, c)), shape=(n, n)).tocsr()
        mat.sum_duplicates()
        return cls(mat, n)

    def tocsr(self) -> sp.csr_matrix:
        """Full symmetric CSR (cached)."""
        if self._full is None:
            strict = sp.tril(self.lower, k=-1)
            self._full = (self.lower + strict.T).tocsr()
        return self._full

    def toarray(self) -> np.ndarray:
        return self.tocsr().toarray()

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.tocsr() @ x

    def diagonal(self) -> np.ndarray:
        return self.lower.diagonal()

    def submatrix(self, keep: np.ndarray) -> "SparseSymmetric":
        full = self.tocsr()[keep][:, keep]
        return SparseSymmetric(sp.tril(full).tocsr(), len(keep))


@dataclass
class FormTriple:
    """Assembled Robin form: stiffness A, Robin boundary mass B, mass M.

    Matrices act on the reduced dof space after the artificial-boundary
    (and, for azimuthal modes m >= 1, axis) elimination recorded in
    ``dof_map`` (node index -> dof index, -1 if eliminated).
    """

    A: SparseSymmetric
    B: SparseSymmetric
    M: SparseSymmetric
    dof_map: np.ndarray
    alpha: float
    artificial_bc: str
    mode: Optional[int] = None

    @property
    def n_dofs(self) -> int:
        return self.A.n

    def pencil(self, shift: float = 0.0) -> sp.csr_matrix:
        """A - alpha*B - shift*M as a full symmetric CSR matrix."""
        K = self.A.tocsr() - self.alpha * self.B.tocsr()
        if shift != 0.0:
            K = K - shift * self.M.tocsr()
        return K.tocsr()


def _triangle_geometry(mesh: Mesh):
    p = mesh.nodes[mesh.triangles]
    x, y = p[..., 0], p[..., 1]
    bvec = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    cvec = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    area = 0.5 * (bvec[:, 0] * cvec[:, 1] - bvec[:, 1] * cvec[:, 0])
    if np.any(area <= 0.0):
        raise SingularElement(
            f"{np.sum(area <= 0)} triangles with nonpositive area"
        )
    return p, bvec, cvec, area


def _eliminate(mesh: Mesh, artificial_bc: str, drop_axis: bool) -> np.ndarray:
    drop = np.zeros(mesh.n_nodes, dtype=bool)
    if artificial_bc == "dirichlet":
        art = mesh.boundary_edges[mesh.edge_tags == int(Tag.ARTIFICIAL)]
        drop[np.unique(art)] = True
    if drop_axis:
        ax = mesh.boundary_edges[mesh.edge_tags == int(Tag.AXIS)]
        drop[np.unique(ax)] = True
    dof_map = np.full(mesh.n_nodes, -1, dtype=np.int64)
    keep = np.flatnonzero(~drop)
    dof_map[keep] = np.arange(len(keep))
    return dof_map


def _collect(dof_map, elem_nodes, local, n_dofs):
    """Scatter (n_elem, k, k) local matrices into symmetric triplets."""
    k = elem_nodes.shape[1]
    gi = dof_map[elem_nodes]
    rows, cols, vals = [], [], []
    for a in range(k):
        for b in range(a + 1):
            keep = (gi[:, a] >= 0) & (gi[:, b] >= 0)
            rows.append(gi[keep, a])
            cols.append(gi[keep, b])
            vals.append(local[keep, a, b])
    return SparseSymmetric.from_triplets(
        np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), n_dofs
    )


# ---------------------------------------------------------------------------
# planar assembly (exact closed forms)
# ---------------------------------------------------------------------------

def assemble_planar(mesh: Mesh, alpha: float, artificial_bc: str = "dirichlet") -> FormTriple:
    """Assemble the planar Robin form with exact P1 element integration."""
    if mesh.meridian:
        raise SingularElement("planar assembly on a meridian mesh")
    _, bvec, cvec, area = _triangle_geometry(mesh)
    dof_map = _eliminate(mesh, artificial_bc, drop_axis=False)
    n_dofs = int(dof_map.max()) + 1

    stiff = (
        bvec[:, :, None] * bvec[:, None, :] + cvec[:, :, None] * cvec[:, None, :]
    ) / (4.0 * area)[:, None, None]
    A = _collect(dof_map, mesh.triangles, stiff, n_dofs)

    mass_ref = (np.ones((3, 3)) + np.eye(3)) / 12.0
    mass = area[:, None, None] * mass_ref[None, :, :]
    M = _collect(dof_map, mesh.triangles, mass, n_dofs)

    robin = mesh.boundary_edges[mesh.edge_tags == int(Tag.ROBIN)]
    L = mesh.edge_lengths(robin)
    edge_ref = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0
    bl = L[:, None, None] * edge_ref[None, :, :]
    B = _collect(dof_map, robin, bl, n_dofs)

    return FormTriple(A, B, M, dof_map, alpha, artificial_bc)


# ---------------------------------------------------------------------------
# axisymmetric assembly (weight r_cyl, azimuthal mode m)
# ---------------------------------------------------------------------------

def assemble_axisymmetric(
    mesh: Mesh,
    alpha: float,
    mode: int = 0,
    artificial_bc: str = "dirichlet",
    eliminate_axis: Optional[bool] = None,
) -> FormTriple:
    """Assemble the Robin form on a meridian mesh for azimuthal mode m.

    The 3D integrals reduce to the half-section with weight r_cyl (the 2*pi
    azimuthal factor cancels in all quotients):

        A_m = int (grad u . grad v + m^2 u v / r^2) r dr dz
        M   = int u v r dr dz,   B = int u v r ds.

    Gradient and mass terms use closed-form degree-3 integration; the
    m^2/r^2 term uses the 3-point mid-edge rule (on axis edges the
    eliminated hat functions vanish quadratically, so the singular quotient
    is taken as its zero limit).  For m >= 1 the axis dofs are removed;
    assembling m >= 1 without elimination raises AxisSingularity.
    """
    if not mesh.meridian:
        raise SingularElement("axisymmetric assembly needs a meridian mesh")
    if mode < 0:
        raise AxisSingularity("azimuthal mode must be nonnegative")
    if eliminate_axis is None:
        eliminate_axis = mode >= 1
    if mode >= 1 and not eliminate_axis:
        raise AxisSingularity("mode m >= 1 requires axis-dof elimination")

    p, bvec, cvec, area = _triangle_geometry(mesh)
    dof_map = _eliminate(mesh, artificial_bc, drop_axis=eliminate_axis)
    n_dofs = int(dof_map.max()) + 1

    r_nodes = p[..., 0]                     # r_cyl of the three vertices
    r_bar = r_nodes.mean(axis=1)

    stiff = (
        (bvec[:, :, None] * bvec[:, None, :] + cvec[:, :, None] * cvec[:, None, :])
        / (4.0 * area)[:, None, None]
        * r_bar[:, None, None]
    )

    if mode >= 1:
        # m^2 * phi_i phi_j / r with the mid-edge rule: midpoint opposite
        # vertex k has phi_k = 0, others 1/2
        mids = 0.5 * (r_nodes[:, [1, 2, 0]] + r_nodes[:, [2, 0, 1]])
        pen = np.zeros_like(stiff)
        w = area / 3.0
        for k in range(3):  # midpoint opposite vertex k
            rmid = mids[:, k]
            vals = np.zeros(len(area))
            ok = rmid > 1e-14
            vals[ok] = 0.25 / rmid[ok]      # (1/2)*(1/2)/r, zero limit on axis
            for a in range(3):
                for b in range(3):
                    if a != k and b != k:
                        pen[:, a, b] += w * vals
        stiff = stiff + mode**2 * pen
    A = _collect(dof_map, mesh.triangles, stiff, n_dofs)

    # int phi_i phi_j r: expand r in hats, use exact cubic moments
    # int phi^3 = |K|/10, phi^2 psi = |K|/30, phi psi chi = |K|/60
    mass = np.zeros((len(area), 3, 3))
    for a in range(3):
        for b in range(3):
            for c in range(3):
                idx = sorted([a, b, c])
                if idx[0] == idx[2]:
                    mom = 1.0 / 10.0
                elif idx[0] == idx[1] or idx[1] == idx[2]:
                    mom = 1.0 / 30.0
                else:
                    mom = 1.0 / 60.0
                mass[:, a, b] += mom * r_nodes[:, c]
    mass *= area[:, None, None]
    M = _collect(dof_map, mesh.triangles, mass, n_dofs)

    robin = mesh.boundary_edges[mesh.edge_tags == int(Tag.ROBIN)]
    L = mesh.edge_lengths(robin)
    r1 = mesh.nodes[robin[:, 0], 0]
    r2 = mesh.nodes[robin[:, 1], 0]
    bl = np.empty((len(robin), 2, 2))
    bl[:, 0, 0] = L * (3.0 * r1 + r2) / 12.0
    bl[:, 1, 1] = L * (r1 + 3.0 * r2) / 12.0
    bl[:, 0, 1] = bl[:, 1, 0] = L * (r1 + r2) / 12.0
    B = _collect(dof_map, robin, bl, n_dofs)

    return FormTriple(A, B, M, dof_map, alpha, artificial_bc, mode)


# ---------------------------------------------------------------------------
# quotients and export
# ---------------------------------------------------------------------------

def rayleigh_quotient(forms: FormTriple, x: np.ndarray) -> float:
    """(x'Ax - alpha x'Bx) / (x'Mx) on the reduced dof space."""
    x = np.asarray(x, dtype=float)
    mxm = float(x @ forms.M.matvec(x))
    if mxm <= 0.0:
        raise ZeroVector("Rayleigh quotient of a vector with zero mass norm")
    qa = float(x @ forms.A.matvec(x))
    qb = float(x @ forms.B.matvec(x))
    return (qa - forms.alpha * qb) / mxm


def interpolate(mesh: Mesh, forms: FormTriple, fn) -> np.ndarray:
    """Nodal interpolation of fn(x, y) restricted to the dof space."""
    vals = fn(mesh.nodes[:, 0], mesh.nodes[:, 1])
    keep = forms.dof_map >= 0
    out = np.zeros(forms.n_dofs)
    out[forms.dof_map[keep]] = vals[keep]
    return out


def save_matrix_market(mat: SparseSymmetric, path: str, comment: str = "") -> None:
    """Write the lower triangle in MatrixMarket coordinate symmetric format."""
    coo = mat.lower.tocoo()
    with open(path, "w") as f:
        f.write("%%MatrixMarket matrix coordinate real symmetric\n")
        if comment:
            f.write(f"% {comment}\n")
        f.write(f"{mat.n} {mat.n} {coo.nnz}\n")
        for i, j, v in zip(coo.row, coo.col, coo.data):
            f.write(f"{i + 1} {j + 1} {float(v)!r}\n")
