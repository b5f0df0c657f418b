import numpy as np
import pytest

from pumbilic.errors import NotNormallyHyperbolic
from pumbilic.jet_model import GraphImmersion
from pumbilic.lie_cartan import LCState, find_singular_branches
from pumbilic.restricted_forms import restricted_coefficients, slope_quadratic_roots
from pumbilic.tracer import (Polyline, SCurve, TraceParams, e3_orthogonality, frechet_distance,
                             implicit_residual, lc_orbit_residual, trace_lc_orbit,
                             trace_principal_line, trace_separatrix_family)


def test_principal_line_residuals(fixtures):
    jet = fixtures["J1"]
    pl = trace_principal_line(jet, (0.05, 0.0, 0.01), "F1", TraceParams(max_length=0.1))
    assert pl.length == pytest.approx(0.1, rel=1e-3)
    assert max(implicit_residual(jet, p, t) for p, t in zip(pl.points, pl.tangents)) < 1e-8
    assert max(e3_orthogonality(jet, p, t) for p, t in zip(pl.points, pl.tangents)) < 1e-7
    assert pl.tangent_consistency() < 0.05


def test_cylinder_generators_are_straight():
    """On the cylinder h = (u1^2 + u2^2)/2 the zero-curvature lines keep u1, u2 fixed."""
    hess = lambda u: np.diag([1.0, 1.0, 0.0]).astype(np.result_type(u, float))
    cyl = GraphImmersion(lambda u: (u[0] ** 2 + u[1] ** 2) / 2,
                         grad=lambda u: np.array([u[0], u[1], 0 * u[2]]), hess=hess, simple="lower")
    pl = trace_principal_line(cyl, (0.1, 0.05, 0.0), "F3", TraceParams(max_length=0.3))
    assert np.ptp(pl.points[:, :2], axis=0).max() < 1e-8


def test_lc_orbit_projects_to_principal_line(fixtures):
    jet = fixtures["J1"]
    u0 = np.array([0.03, 0.02, 0.01])
    Lr, Mr, Nr, _, _ = restricted_coefficients(jet, u0)
    P = slope_quadratic_roots([Lr, Mr, Nr]).roots[0]
    orb = trace_lc_orbit(jet, LCState(u0, P), TraceParams(max_length=1.0), max_projected_length=0.1)
    assert lc_orbit_residual(jet, orb) < 1e-8
    ref = orb.points[1] - orb.points[0]
    d = min(frechet_distance(orb, trace_principal_line(jet, u0, w, TraceParams(max_length=0.1),
                                                       reference=ref), 0.09) for w in ("F1", "F2"))
    assert d < 1e-4


def test_stationary_orbit_at_singular_point(fixtures):
    orb = trace_lc_orbit(fixtures["J1"], LCState(np.zeros(3), 0.0))
    assert orb.termination == "near-S"


def test_separatrix_family_approaches_curve(fixtures):
    br = find_singular_branches(fixtures["J1"])[0]
    fam = trace_separatrix_family(br, n_leaves=4)
    assert fam.nh_type == "saddle" and len(fam.leaves) == 8
    assert not fam.flagged
    for lf in fam.leaves:
        assert fam.curve.distance(lf.points[-1]) < fam.curve.distance(lf.points[0])


def test_saddle_node_needs_partial(fixtures):
    br = {b.label: b for b in find_singular_branches(fixtures["J4"])}["zeta2"]
    with pytest.raises(NotNormallyHyperbolic):
        trace_separatrix_family(br, n_leaves=2)
    fam = trace_separatrix_family(br, n_leaves=2, allow_partial=True)
    assert fam.partial


def test_frechet_of_identical_and_shifted():
    t = np.linspace(0, 1, 50)
    a = np.stack([t, 0 * t, 0 * t], axis=1)
    assert frechet_distance(a, a) == 0
    assert frechet_distance(a, a + [0, 1e-3, 0]) == pytest.approx(1e-3)


def test_polyline_helpers():
    pts = np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0.0]])
    pl = Polyline("F1", pts, np.tile([1.0, 0, 0], (3, 1)), "max-length")
    assert pl.length == 2
    assert pl.truncated(1.5).points[-1] == pytest.approx([1.5, 0, 0])
    assert np.allclose(pl.reversed().points[0], [2, 0, 0])
    assert SCurve(pts).distance([1.0, 1.0, 0.0]) == pytest.approx(1.0)
