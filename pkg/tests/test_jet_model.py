import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pumbilic.errors import AllCubicsZero, ZeroCurvature
from pumbilic.jet_model import (GraphImmersion, MongeImmersion, MongeJet, adapt_rotation,
                                adapt_scale, as_immersion, eval_height, rotate_jet)
from pumbilic.poly import TruncPoly

coef = st.floats(-2, 2, allow_nan=False)
jets = st.builds(lambda vals: MongeJet(**dict(zip(MongeJet.names(), vals))),
                 st.lists(coef, min_size=26, max_size=26))


@given(jets)
@settings(max_examples=30, deadline=None)
def test_poly_round_trip(jet):
    assert np.allclose(MongeJet.from_poly(jet.to_poly()).as_array(), jet.as_array())


@given(jets, st.floats(-3, 3))
@settings(max_examples=30, deadline=None)
def test_rotation_preserves_height(jet, theta):
    rot = rotate_jet(jet, theta)
    u = np.array([0.3, -0.2, 0.1])
    R = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    x = np.concatenate([R @ u[:2], [u[2]]])
    assert eval_height(rot, u) == pytest.approx(eval_height(jet, x), abs=1e-12)


@given(jets)
@settings(max_examples=30, deadline=None)
def test_adapt_rotation_kills_d(jet):
    if max(abs(jet.a), abs(jet.b), abs(jet.c), abs(jet.d)) < 1e-3:
        return
    out, theta = adapt_rotation(jet)
    assert out.d == 0
    # the rotated height still matches the original one
    u = np.array([0.2, 0.1, -0.3])
    R = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    x = np.concatenate([R @ u[:2], [u[2]]])
    full = rotate_jet(jet, theta)
    assert abs(full.d) < 1e-9 * (1 + jet.scale())
    assert eval_height(out.replace(d=full.d), u) == pytest.approx(eval_height(jet, x), abs=1e-10)


def test_adapt_rotation_all_cubic_zero_warns():
    with pytest.warns(AllCubicsZero):
        out, theta = adapt_rotation(MongeJet(k=1, k3=2))
    assert theta == 0.0


def test_homothety_normalizes_k3():
    jet = MongeJet(k=0.5, k3=2.0, a=1.0, Q211=3.0)
    out = adapt_scale(jet)
    assert out.k3 == 1.0
    assert out.k == pytest.approx(0.25)
    assert out.a == pytest.approx(0.25)  # cubic terms scale by 1/k3^2
    assert out.Q211 == pytest.approx(3.0 / 8)
    with pytest.raises(ZeroCurvature):
        adapt_scale(MongeJet(k=1.0))


def test_inversion_flattens_pair():
    jet = MongeJet(k=0.4, k3=1.5, a=1.0, b=0.3)
    out = adapt_scale(jet, "k_to_0")
    assert out.k == 0.0
    assert out.k3 == pytest.approx(jet.k3 - jet.k, rel=1e-9)


def test_monge_derivatives_match_graph_immersion():
    jet = MongeJet(k=0.3, k3=1.1, a=0.4, b=-0.7, c=0.2, q012=0.5, Q211=0.9)
    mi = MongeImmersion(jet)
    gi = GraphImmersion(lambda u: eval_height(jet, u))
    u = np.array([0.05, -0.03, 0.02])
    a1, D1, D2 = mi.derivatives(u)
    a2, E1, E2 = gi.derivatives(u)
    assert np.allclose(a1, a2)
    assert np.allclose(D1, E1, atol=1e-8)
    assert np.allclose(D2, E2, atol=1e-4)


def test_as_immersion():
    jet = MongeJet(k=0, k3=1)
    assert isinstance(as_immersion(jet), MongeImmersion)
    with pytest.raises(TypeError):
        as_immersion(3.0)


def test_truncpoly_arithmetic():
    x = TruncPoly.variable(0, 3)
    y = TruncPoly.variable(1, 3)
    p = (1 + x) * (1 - y) / 2
    assert p(np.array([0.5, 0.25, 0.0])) == pytest.approx(1.5 * 0.75 / 2)
    q = (x * x * x * x)  # beyond the truncation order
    assert q(np.array([1.0, 0.0, 0.0])) == 0.0
