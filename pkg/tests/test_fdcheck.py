import numpy as np
import pytest

from robincone.eigen import count_below, eigenpairs_below
from robincone.fdcheck import fd_meridian_forms


def test_halfspace_has_no_discrete_spectrum():
    forms = fd_meridian_forms(np.pi / 2, 1.0, 15.0, n_rho=300, n_psi=120)
    assert count_below(forms, -1.001) == 0


def test_sharp_cone_ground_state_value():
    # exact ground state exp(-z/sin(theta0)) of the circular cone gives
    # lambda_1 = -1/sin(theta0)^2 = -2 at theta0 = pi/4
    forms = fd_meridian_forms(np.pi / 4, 1.0, 20.0, n_rho=400, n_psi=160)
    res = eigenpairs_below(forms, -1.5, 1)
    assert len(res.values) == 1
    assert res.values[0] == pytest.approx(-2.0, abs=5e-3)


def test_neumann_variant_counts_at_least_dirichlet():
    fd = fd_meridian_forms(np.pi / 4, 1.0, 15.0, 300, 120, "dirichlet")
    fn = fd_meridian_forms(np.pi / 4, 1.0, 15.0, 300, 120, "neumann")
    assert count_below(fn, -1.001) >= count_below(fd, -1.001)


def test_mass_matrix_is_the_cone_volume():
    theta0, R_T = np.pi / 3, 6.0
    forms = fd_meridian_forms(theta0, 1.0, R_T, 200, 100, "neumann")
    one = np.ones(forms.n_dofs)
    volume_over_2pi = R_T**3 / 3.0 * (1 - np.cos(theta0))
    assert one @ forms.M.matvec(one) == pytest.approx(volume_over_2pi, rel=1e-12)
    assert one @ forms.A.matvec(one) == pytest.approx(0.0, abs=1e-9)
    assert one @ forms.B.matvec(one) == pytest.approx(
        np.sin(theta0) * R_T**2 / 2.0, rel=1e-12
    )
