import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pumbilic.fundamental_forms import compute_forms
from pumbilic.jet_model import MongeImmersion, MongeJet
from pumbilic.oracles import BY_NAME, _slope, coefficient_diff, observed_orders, random_jet
from pumbilic.poly import TruncPoly
from pumbilic.principal_structure import simple_curvature
from pumbilic.series import diff, inv_sqrt, inverse, jet_series


def test_series_inverse_and_sqrt():
    x = TruncPoly.variable(0, 4)
    p = 2.0 + x
    assert (p * inverse(p))(np.array([0.1, 0, 0])) == pytest.approx(1.0, abs=1e-5)
    s = inv_sqrt(p)
    assert (s * s * p)(np.array([0.05, 0, 0])) == pytest.approx(1.0, abs=1e-6)


def test_diff():
    x, y = TruncPoly.variable(0, 3), TruncPoly.variable(1, 3)
    d = diff(x * x * y, 0)
    assert d(np.array([0.5, 2.0, 0.0])) == pytest.approx(2.0)


@given(st.integers(0, 10_000))
@settings(max_examples=15, deadline=None)
def test_expansion_matches_pointwise_values(seed):
    """The exact series agrees with the numerics to the truncation order."""
    jet = random_jet(np.random.default_rng(seed))
    ser = jet_series(jet, 3)
    u = 1e-4 * np.random.default_rng(seed + 1).normal(size=3)
    fs = compute_forms(MongeImmersion(jet), u)
    assert ser.g[0][2](u) == pytest.approx(fs.g[0, 2], abs=1e-12)
    assert ser.lam[2][2](u) == pytest.approx(fs.lam[2, 2], abs=1e-12)
    assert ser.k3(u) == pytest.approx(float(np.real(simple_curvature(fs))), abs=1e-12)


def test_printed_series_agree_where_no_defect():
    jet = random_jet(np.random.default_rng(3))
    for name in ("g11", "g22", "g33", "lambda11", "Er", "Gr"):
        assert coefficient_diff(jet, name) == []


def test_known_defect_is_located():
    jet = MongeJet(k=0.5, k3=2.0, q201=1.0)
    # u1 u3 should carry k k3 and u1 u3^2 should carry k3 q201
    assert coefficient_diff(jet, "g13") == [((1, 0, 1), 2.0, 1.0), ((1, 0, 2), 1.0, 2.0)]


def test_slope_estimator():
    hs = np.array([0.1, 0.05, 0.025, 0.0125])
    assert _slope(hs, 3 * hs**3, 0.0) == pytest.approx(3.0)
    assert _slope(hs, 3 * hs**3 * (1 + 2 * hs), 0.0, corrected=True) == pytest.approx(3.0, abs=0.05)
    assert _slope(hs, np.full(4, 1e-17), 1e-13) is None


def test_observed_orders_against_expansion():
    rng = np.random.default_rng(5)
    jet = random_jet(rng)
    d = rng.normal(size=3)
    d /= np.linalg.norm(d)
    entries = [BY_NAME[n] for n in ("g12", "k3", "calU", "Lr")]
    orders = observed_orders(jet, d, (0.02, 0.01, 0.005), entries, "expansion")
    for e in entries:
        assert orders[e.name] is None or orders[e.name] > e.required - 0.3
