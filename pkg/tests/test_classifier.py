import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pumbilic.classifier import (ContinuationParams, curve_coefficients_d12_oracle,
                                 curve_coefficients_d23_oracle, PUKind, arc_pattern, chi12, chi12_reduced,
                                 classify_point, continue_pu_curve, curve_plane_contact,
                                 fit_local_jet, plane_omega)
from pumbilic.errors import NewtonDiverged
from pumbilic.jet_model import MongeImmersion, MongeJet, adapt_rotation, adapt_scale, rotate_jet
from pumbilic.restricted_forms import restricted_coefficients
from pumbilic.verify import class_jet


def test_fixture_kinds(fixtures):
    kinds = {n: classify_point(j).kind for n, j in fixtures.items()}
    assert kinds == {"J1": PUKind.D1, "J2": PUKind.D2, "J3": PUKind.D3,
                     "J4": PUKind.D12, "J5": PUKind.D23}


@pytest.mark.parametrize("kind", ["D1", "D2", "D3", "D12", "D23"])
def test_random_class_jets(kind):
    rng = np.random.default_rng(4)
    for _ in range(10):
        assert classify_point(class_jet(rng, kind)).kind.value == kind


def test_degenerate_cases():
    assert classify_point(MongeJet(k=1, k3=1)).kind is PUKind.UMBILIC
    assert classify_point(MongeJet(k=0, k3=1, a=1)).kind is PUKind.NONGENERIC  # b = 0
    assert classify_point(MongeJet(k=0, k3=1, a=1, b=1, d=0.5)).kind is PUKind.NONGENERIC
    assert "c=0" in classify_point(MongeJet(k=0, k3=1, a=2, b=1)).reason


@given(st.floats(0.5, 2), st.floats(-1, 1))
@settings(max_examples=40, deadline=None)
def test_scale_invariance_of_type(lam, c):
    """Homothety keeps the type: cubic coefficients all scale by the same factor."""
    jet = MongeJet(k=0, k3=1, a=1.7, b=1.0, c=c)
    scaled = jet.replace(a=lam * jet.a, b=lam * jet.b, c=lam * jet.c)
    assert classify_point(scaled).kind == classify_point(jet).kind


def test_reduced_chi12():
    jet = MongeJet(k=0.2, k3=1.1, a=2, b=0.7, c=0.3, q201=0.4, q021=0.4, q012=0.3, Q211=0.8, B=0.5)
    assert chi12(jet) == pytest.approx(chi12_reduced(jet), rel=1e-12)


def test_curve_points_are_partially_umbilic(fixtures):
    imm = fixtures["J1"]
    pts = continue_pu_curve(imm, params=ContinuationParams(step=5e-3, n_steps=4))
    assert len(pts) == 9
    for p in pts:
        Lr, Mr, Nr, _, _ = restricted_coefficients(imm, p.u)
        assert max(abs(Lr), abs(Mr), abs(Nr)) < 1e-10
    arcs = [p.arc for p in pts]
    assert arcs == sorted(arcs)


def test_patterns(fixtures):
    for name, want in (("J5", {"D2|D23|D3", "D3|D23|D2"}), ("J4", {"D1|D12|D2", "D2|D12|D1"})):
        pts = continue_pu_curve(fixtures[name], params=ContinuationParams(step=5e-3, n_steps=6))
        assert arc_pattern(fixtures[name], pts) in want


def test_contact_is_transversal_at_d1(fixtures):
    pts = continue_pu_curve(fixtures["J1"], params=ContinuationParams(step=5e-3, n_steps=3))
    reps = curve_plane_contact(pts, plane_omega(fixtures["J1"]))
    assert all(r.label == "transversal" for r in reps)


def test_fit_local_jet_recovers_origin(fixtures):
    jet, _ = fit_local_jet(fixtures["J2"], np.zeros(3))
    assert jet.a == pytest.approx(1.5, abs=1e-5) and jet.b == pytest.approx(1.0, abs=1e-5)


def test_seed_far_from_curve(fixtures):
    with pytest.raises(NewtonDiverged):
        continue_pu_curve(fixtures["J1"], seed=(1.0, 1.0, 1.0))


def _continued(jet, step=2e-3, n=6):
    pts = continue_pu_curve(MongeImmersion(jet), params=ContinuationParams(step=step, n_steps=n))
    return np.array([p.u for p in pts])


def test_d12_curve_slopes_match_closed_form(fixtures):
    rng = np.random.default_rng(11)
    jets = [fixtures[n] for n in ("J1", "J2", "J3", "J4")] + [class_jet(rng, "D12") for _ in range(4)]
    for jet in jets:
        U = _continued(jet)
        got = [np.polyfit(U[:, 2], U[:, i], 4)[-2] for i in (0, 1)]
        np.testing.assert_allclose(got, curve_coefficients_d12_oracle(jet), rtol=1e-4, atol=1e-8)


def test_off_d12_u1_slope_departs_from_closed_form():
    # the u2 slope -q111/b holds everywhere; the u1 slope only at a = 2b
    jet = class_jet(np.random.default_rng(11), "D1")
    U = _continued(jet)
    got = [np.polyfit(U[:, 2], U[:, i], 4)[-2] for i in (0, 1)]
    want = curve_coefficients_d12_oracle(jet)
    assert got[1] == pytest.approx(want[1], rel=1e-4)
    assert got[0] != pytest.approx(want[0], rel=1e-2)


def test_d23_curve_coefficients_derived(fixtures):
    rng = np.random.default_rng(12)
    for jet in [fixtures["J5"]] + [class_jet(rng, "D23") for _ in range(3)]:
        U = _continued(jet)
        got = [np.polyfit(U[:, 0], U[:, i], 4)[-3] for i in (1, 2)]
        np.testing.assert_allclose(got, curve_coefficients_d23_oracle(jet, "derived"),
                                   rtol=1e-4, atol=1e-8)
    # the typeset closed forms give a different c3 on J5
    assert curve_coefficients_d23_oracle(fixtures["J5"]) != pytest.approx((0.0, 1.0))


@pytest.mark.parametrize("kind", ["D1", "D2", "D3"])
def test_type_survives_rotation_and_scaling(kind):
    rng = np.random.default_rng(21)
    for _ in range(100):
        jet = class_jet(rng, kind)
        turned, _ = adapt_rotation(rotate_jet(jet, rng.uniform(0, 2 * np.pi)))
        assert classify_point(turned).kind.value == kind
        for target in ("k3_to_1", "k_to_0"):
            assert classify_point(adapt_scale(jet, target)).kind.value == kind
