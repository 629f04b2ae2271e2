"""Independent finite-volume discretization for count cross-validation.

A deliberately different scheme from the P1 finite-element path: tensor
grid in spherical meridian coordinates (rho, psi), flux-based five-point
stencil, diagonal (lumped) mass.  Used to confirm eigenvalue counts from
the FEM pipeline on axisymmetric cones; the two discretizations share no
code beyond the counting backend.

The axisymmetric (m = 0) operator in meridian spherical coordinates is

    -(1/rho^2) d/drho(rho^2 du/drho) - (1/(rho^2 sin psi)) d/dpsi(sin psi du/dpsi)

self-adjoint with respect to the volume weight rho^2 sin(psi); the Robin
wall at psi = theta0 contributes the boundary weight rho sin(theta0).
"""

from __future__ import annotations

import numpy as np

from .fem import FormTriple, SparseSymmetric


def fd_meridian_forms(
    theta0: float,
    alpha: float,
    R_T: float,
    n_rho: int,
    n_psi: int,
    artificial_bc: str = "dirichlet",
) -> FormTriple:
    """Five-point finite-volume pencil for the circular cone of angle theta0.

    Nodes sit at rho_i = i*R_T/n_rho (i = 0..n_rho) and psi_j = j*theta0/n_psi
    (j = 0..n_psi).  The truncation circle rho = R_T is removed for the
    Dirichlet variant and kept for Neumann; psi = 0 is the symmetry axis
    (natural condition), psi = theta0 the Robin wall.
    """
    drho = R_T / n_rho
    dpsi = theta0 / n_psi
    rho = np.arange(n_rho + 1) * drho
    psi = np.arange(n_psi + 1) * dpsi

    last = n_rho + 1 if artificial_bc == "neumann" else n_rho
    nr = last
    npts = nr * (n_psi + 1)

    def idx(i, j):
        return i * (n_psi + 1) + j

    # cell boundaries (clipped at the domain ends)
    rho_lo = np.maximum(rho - drho / 2.0, 0.0)
    rho_hi = np.minimum(rho + drho / 2.0, R_T)
    psi_lo = np.maximum(psi - dpsi / 2.0, 0.0)
    psi_hi = np.minimum(psi + dpsi / 2.0, theta0)

    vol_r = (rho_hi**3 - rho_lo**3) / 3.0
    vol_p = np.cos(psi_lo) - np.cos(psi_hi)

    rows, cols, vals = [], [], []
    mrows, mvals = [], []
    brows, bvals = [], []

    for i in range(nr):
        for j in range(n_psi + 1):
            a = idx(i, j)
            mrows.append(a)
            mvals.append(vol_r[i] * vol_p[j])
            if j == n_psi:
                brows.append(a)
                bvals.append(np.sin(theta0) * (rho_hi[i] ** 2 - rho_lo[i] ** 2) / 2.0)

    diag = np.zeros(npts)

    def add_flux(a, bidx, coeff):
        diag[a] += coeff
        diag[bidx] += coeff
        rows.append(max(a, bidx))
        cols.append(min(a, bidx))
        vals.append(-coeff)

    # radial faces between (i, j) and (i+1, j)
    for i in range(n_rho):
        r_face = (i + 0.5) * drho
        for j in range(n_psi + 1):
            coeff = r_face**2 * vol_p[j] / drho
            a = idx(i, j)
            if i + 1 < nr:
                add_flux(a, idx(i + 1, j), coeff)
            else:
                # Dirichlet neighbor at rho = R_T: u = 0 there
                if artificial_bc == "dirichlet":
                    diag[a] += coeff

    # angular faces between (i, j) and (i, j+1)
    for j in range(n_psi):
        s_face = np.sin((j + 0.5) * dpsi)
        for i in range(nr):
            coeff = s_face * (rho_hi[i] - rho_lo[i]) / dpsi
            add_flux(idx(i, j), idx(i, j + 1), coeff)

    rows += list(range(npts))
    cols += list(range(npts))
    vals += list(diag)

    A = SparseSymmetric.from_triplets(rows, cols, vals, npts)
    M = SparseSymmetric.from_triplets(mrows, mrows, mvals, npts)
    B = SparseSymmetric.from_triplets(brows, brows, bvals, npts)
    return FormTriple(A, B, M, np.arange(npts), alpha, artificial_bc, mode=0)
