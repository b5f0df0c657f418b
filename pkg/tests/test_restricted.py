import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pumbilic.errors import AllCoefficientsZero
from pumbilic.jet_model import MongeJet
from pumbilic.restricted_forms import (local_geometry, restricted_coefficients,
                                       restricted_with_gradient, slope_quadratic_roots)

J1 = MongeJet(k=0, k3=1, a=4, b=1)


def test_origin_is_partially_umbilic():
    Lr, Mr, Nr, U, V = restricted_coefficients(J1, np.zeros(3))
    assert abs(Lr) < 1e-14 and abs(Mr) < 1e-14 and abs(Nr) < 1e-14
    assert U == 0 and V == 0


def test_plane_vectors_are_tangent_to_plane():
    u = np.array([0.03, -0.02, 0.04])
    geo = local_geometry(J1, u)
    for v in (np.array([1.0, 0.0, geo.plane.calU]), np.array([0.0, 1.0, geo.plane.calV])):
        assert abs(np.real(geo.plane.omega) @ v) < 1e-14


def test_gradient_matches_finite_difference():
    u = np.array([0.01, 0.02, -0.01])
    _, dv = restricted_with_gradient(J1, u)
    h = 1e-6
    fd = np.stack([(restricted_coefficients(J1, u + h * e) - restricted_coefficients(J1, u - h * e)) / (2 * h)
                   for e in np.eye(3)], axis=1)
    assert np.allclose(np.real(dv), fd, atol=1e-7)


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.1, 3))
@settings(max_examples=60, deadline=None)
def test_slope_roots_solve_quadratic(r1, r2, L):
    M, N = -L * (r1 + r2), L * r1 * r2
    res = slope_quadratic_roots([L, M, N])
    for r in res.roots:
        assert abs(L * r * r + M * r + N) <= 1e-9 * max(1.0, L * r * r, abs(M * r), abs(N))


def test_slope_roots_special_cases():
    assert slope_quadratic_roots([0.0, 1.0, -2.0]) == ((2.0,), (1,), True)
    assert slope_quadratic_roots([1.0, 0.0, 1.0]).roots == ()
    assert slope_quadratic_roots([1.0, -2.0, 1.0]).multiplicity == (2,)
    with pytest.raises(AllCoefficientsZero):
        slope_quadratic_roots([0.0, 0.0, 0.0])
