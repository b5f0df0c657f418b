import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pumbilic.errors import NotPositiveDefinite
from pumbilic.fundamental_forms import FormsSample, compute_forms
from pumbilic.jet_model import MongeImmersion, MongeJet
from pumbilic.oracles import random_jet
from pumbilic.principal_structure import (integrability_density, integrability_linear_oracle,
                                          plane_field, principal_solve, simple_curvature)


def test_principal_solve_sorted_and_g_orthonormal():
    jet = MongeJet(k=0.1, k3=1.0, a=0.7, b=0.2, q201=0.4)
    fs = compute_forms(MongeImmersion(jet), np.array([0.05, 0.02, -0.04]))
    pd = principal_solve(fs)
    assert pd.k1 <= pd.k2 <= pd.k3
    E = pd.directions
    g = np.real(fs.g)
    assert np.allclose(E @ g @ E.T, np.eye(3), atol=1e-12)


def test_umbilic_flags_at_origin():
    fs = compute_forms(MongeImmersion(MongeJet(k=0.0, k3=1.0)), np.zeros(3))
    pd = principal_solve(fs)
    assert pd.nonunique12 and not pd.nonunique23


def test_not_positive_definite():
    fs = FormsSample(g=np.diag([1.0, -1.0, 1.0]), lam=np.eye(3), N=np.array([0, 0, 0, 1.0]))
    with pytest.raises(NotPositiveDefinite):
        principal_solve(fs)


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_simple_curvature_matches_eigensolver(seed):
    jet = random_jet(np.random.default_rng(seed))
    u = np.random.default_rng(seed + 1).uniform(-0.05, 0.05, 3)
    fs = compute_forms(MongeImmersion(jet), u)
    assert float(np.real(simple_curvature(fs))) == pytest.approx(principal_solve(fs).k3, abs=1e-12)


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_plane_field_kills_e3(seed):
    """The plane-field 1-form annihilates directions g-orthogonal to e3."""
    jet = random_jet(np.random.default_rng(seed))
    u = np.random.default_rng(seed + 7).uniform(-0.05, 0.05, 3)
    fs = compute_forms(MongeImmersion(jet), u)
    pf = plane_field(fs, simple_curvature(fs))
    e3 = principal_solve(fs).e3
    omega = np.real(pf.omega)
    omega = omega / np.linalg.norm(omega)
    ge3 = np.real(fs.g) @ e3
    assert np.allclose(np.abs(omega), np.abs(ge3 / np.linalg.norm(ge3)), atol=1e-9)


def test_integrability_linear_part_formula():
    jet = MongeJet(k=0.0, k3=1.0, a=1.5, b=1.0, c=0.3, q111=0.4, q201=0.2, q021=-0.1)
    want = integrability_linear_oracle(jet)
    h = 1e-4
    got = [(integrability_density(jet, h * e) - integrability_density(jet, -h * e)) / (2 * h)
           for e in np.eye(3)]
    assert np.allclose(got, want, atol=1e-7)


def test_integrable_at_linear_order_in_special_case():
    jet = MongeJet(k=0.0, k3=1.0, a=1.5, b=1.0, c=0.3, q201=0.2, q021=0.2)
    assert np.allclose(integrability_linear_oracle(jet), 0)
