import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pumbilic.classifier import PUKind
from pumbilic.jet_model import MongeImmersion
from pumbilic.verify import class_jet
from pumbilic.lie_cartan import (LCState, cubic_coefficients, cubic_discriminant,
                                 find_singular_branches, lc_field, lc_gradient, lc_value,
                                 solve_cubic, spectrum_at)


@given(st.lists(st.floats(-3, 3), min_size=3, max_size=3, unique=True), st.floats(0.2, 4))
@settings(max_examples=60, deadline=None)
def test_solve_cubic_three_roots(roots, lead):
    roots = sorted(roots)
    if min(np.diff(roots)) < 1e-2:
        return
    coeffs = lead * np.poly(roots)
    assert np.allclose(solve_cubic(coeffs), roots, atol=1e-9)


def test_solve_cubic_single_and_double():
    assert np.allclose(solve_cubic([1, 0, 1, -2]), [1.0])  # (P - 1)(P^2 + P + 2)
    assert np.allclose(solve_cubic([1, -1, 0, 0]), [0.0, 1.0])  # double root at 0
    assert cubic_discriminant([1, -1, 0, 0]) == 0


def test_field_tangent_to_lc_surface(fixtures):
    imm = MongeImmersion(fixtures["J2"])
    st_ = LCState(np.array([0.02, -0.01, 0.03]), 0.4)
    X = lc_field(imm, st_)
    assert abs(lc_gradient(imm, st_) @ X) < 1e-12 * (1 + np.linalg.norm(X))


def test_charts_agree(fixtures):
    imm = MongeImmersion(fixtures["J1"])
    s = LCState(np.array([0.01, 0.02, -0.01]), 2.5)
    q = s.switched()
    assert q.chart == "Q" and q.P == pytest.approx(0.4)
    # L in the Q chart is L in the P chart divided by P^2
    assert lc_value(imm, q) == pytest.approx(lc_value(imm, s) / 2.5**2)
    assert LCState(np.zeros(3), 20.0).hygienic().chart == "Q"


@pytest.mark.parametrize("name,count", [("J1", 1), ("J2", 3), ("J3", 3), ("J4", 2), ("J5", 3)])
def test_branch_counts(fixtures, name, count):
    brs = find_singular_branches(fixtures[name])
    assert len(brs) == count
    for br in brs:
        st_ = br.state_at(0.0)
        assert np.linalg.norm(lc_field(br.imm, st_)) < 1e-9


def test_branch_roots_match_cubic(fixtures):
    jet = fixtures["J3"]
    roots = solve_cubic(cubic_coefficients(MongeImmersion(jet), np.zeros(3)))
    brs = find_singular_branches(jet)
    assert np.allclose(sorted(b.root_at_origin for b in brs), roots, atol=1e-9)


def test_spectrum_node_on_d2(fixtures):
    brs = {b.label: b for b in find_singular_branches(fixtures["J2"])}
    sp = spectrum_at(brs["gamma1"].imm, brs["gamma1"].state_at(1e-3))
    assert sp.nh_type in ("attractor", "repeller")
    assert sp.zero_residual < 1e-6


def test_curve_jacobian_determinant():
    from pumbilic.jet_model import MongeJet
    from pumbilic.restricted_forms import restricted_with_gradient

    jet = MongeJet(k=0.1, k3=1.2, a=1.7, b=0.6, c=0.4, q111=0.3, q201=-0.2)
    _, dv = restricted_with_gradient(jet, np.zeros(3))
    J = np.real(dv[:2, :2])
    assert np.linalg.det(J) == pytest.approx(jet.b * (jet.b - jet.a), rel=1e-8)


def _gamma1_small_slope(jet, h=1e-3):
    br = {b.label: b for b in find_singular_branches(jet)}["gamma1"]
    pts = []
    for s in (h, -h):
        st = br.state_at(s)
        sp = spectrum_at(br.imm, st)
        pts.append((st.u[0], min((sp.lam3, sp.lam4), key=abs)))
    return (pts[0][1] - pts[1][1]) / (pts[0][0] - pts[1][0])


def _closed_slope(j):
    return j.q201 * ((j.q021 - j.q201) * j.b - j.c * j.q111) / (j.b * (j.k - j.k3))


def _c3_numerator(j):
    dk = j.k - j.k3
    return (j.b * (j.A - j.C) + j.c * j.B - 2 * j.b * j.k**3
            + 2 * (j.b * j.q201**2 - j.b * j.q111**2 + j.c * j.q111 * j.q201) / dk)


def test_d23_small_eigenvalue_slope():
    # d lambda3 / d u1 along gamma1 = closed form - N / b, N the numerator of c3
    rng = np.random.default_rng(3)
    for _ in range(5):
        jet = class_jet(rng, "D23")
        want = _closed_slope(jet) - _c3_numerator(jet) / jet.b
        assert _gamma1_small_slope(jet) == pytest.approx(want, rel=5e-2, abs=1e-6)


def test_d23_slope_closed_form_where_c3_vanishes():
    rng = np.random.default_rng(4)
    for _ in range(5):
        jet = class_jet(rng, "D23")
        jet = jet.replace(A=jet.A - _c3_numerator(jet) / jet.b)  # N is linear in A
        assert abs(_c3_numerator(jet)) < 1e-12
        assert _gamma1_small_slope(jet) == pytest.approx(_closed_slope(jet), rel=5e-2, abs=1e-6)
