"""Acceptance criteria, one test each.

Every test records a ``PASS``/``FAIL`` line in ``REPORT``; the lines are
printed in the pytest terminal summary and when the file is run directly.
Red criteria stay red: the failing line carries the measured numbers.
"""

import time

import numpy as np
import pytest

from pumbilic.classifier import (ContinuationParams, PUKind, arc_pattern, chi12, chi12_reduced,
                                 chi12star, chi12star_reduced, chi23, classify_point,
                                 continue_pu_curve)
from pumbilic.fundamental_forms import compute_forms
from pumbilic.jet_model import MongeImmersion, MongeJet
from pumbilic.lie_cartan import (LCState, branch_discriminant, cubic_coefficients,
                                 cubic_discriminant, find_singular_branches, limit_spectrum,
                                 solve_cubic)
from pumbilic.oracles import ENTRIES, convergence_report, random_jet
from pumbilic.principal_structure import (integrability_density, integrability_linear_oracle,
                                          plane_field, simple_curvature)
from pumbilic.derivatives import gradient
from pumbilic.restricted_forms import restricted_coefficients, slope_quadratic_roots
from pumbilic.tracer import (TraceParams, e3_orthogonality, frechet_distance,
                             implicit_residual, lc_orbit_residual, sector_census,
                             trace_lc_orbit, trace_principal_line)

REPORT: dict[int, str] = {}


def record(num, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {detail}"
    REPORT[num] = line
    print(line)
    return ok


# ------------------------------------------------------------------ 1


def test_oracle_convergence():
    t0 = time.perf_counter()
    res = convergence_report(n_jets=200, seed=0, references=("printed",))
    elapsed = time.perf_counter() - t0
    failing = [r for r in res if not r.passed]
    # the exact series expansion separates defects of the printed series from the numerics
    check = convergence_report(n_jets=40, seed=1, references=("expansion",),
                               entries=[e for e in ENTRIES if e.name in {r.name for r in failing}])
    numerics_ok = all(r.numerics_passed for r in check)
    detail = (f"{len(res) - len(failing)}/{len(res)} entries at the required order, {elapsed:.1f} s; "
              + ("failing: " + ", ".join(f"{r.name} ({r.printed_order:.2f} < {r.required})"
                                         for r in failing) if failing else "none failing")
              + ("; numerics reach the required order against the exact expansion"
                 if numerics_ok else "; numerics also fail against the exact expansion"))
    ok = not failing and elapsed < 30
    record(1, ok, detail)
    assert numerics_ok
    assert elapsed < 30
    assert not failing, detail


# ------------------------------------------------------------------ 2


def test_w1_at_origin():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(500):
        jet = random_jet(rng)
        fs = compute_forms(MongeImmersion(jet), np.zeros(3))
        w1 = float(np.real(plane_field(fs, simple_curvature(fs)).W1))
        want = (jet.k - jet.k3) ** 2
        worst = max(worst, abs(w1 - want) / abs(want))
    ok = worst <= 1e-12
    record(2, ok, f"max relative error of W1(0) over 500 jets {worst:.2e} (tol 1e-12)")
    assert ok


# ------------------------------------------------------------------ 3


def test_fixture_classes(fixtures):
    want = {"J1": PUKind.D1, "J2": PUKind.D2, "J3": PUKind.D3, "J4": PUKind.D12, "J5": PUKind.D23}
    got = {n: classify_point(j).kind for n, j in fixtures.items()}
    # hand substitution: J4 has k=0, k3=1, b=c=Q211=1 and every cubic q zero,
    # which leaves only (k - k3) b^2 Q211 in chi12
    chi12_hand = (0.0 - 1.0) * 1.0**2 * 1.0
    # J5 has k=0, k3=1, b=q201=1: (k - k3)(bA + cB - bC - 2bk^3) = 0 and 3 q201^2 b = 3
    chi23_hand = (0.0 - 1.0) * 0.0 + 3 * 1.0**2 * 1.0
    c12, c23 = chi12(fixtures["J4"]), chi23(fixtures["J5"])
    ok = (got == want and chi12_hand == -1 and chi23_hand == 3
          and abs(c12 - chi12_hand) < 1e-12 and abs(c23 - chi23_hand) < 1e-12)
    record(3, ok, ", ".join(f"{n}->{k.value}" for n, k in got.items())
           + f"; chi12(J4) = {c12:g} (hand {chi12_hand:g}), chi23(J5) = {c23:g} (hand {chi23_hand:g})")
    assert ok


# ------------------------------------------------------------------ 4


def test_root_sets(fixtures):
    want = {"J1": [0.0], "J2": [-np.sqrt(0.5), 0.0, np.sqrt(0.5)],
            "J3": [-np.sqrt(1.5), 0.0, np.sqrt(1.5)], "J5": [-1.0, 0.0, 1.0]}
    errs = {}
    for n, roots in want.items():
        got = np.sort(solve_cubic(cubic_coefficients(MongeImmersion(fixtures[n]), np.zeros(3))))
        errs[n] = float(np.max(np.abs(got - roots))) if len(got) == len(roots) else np.inf
    ok = all(e <= 1e-10 for e in errs.values())
    record(4, ok, "max root error " + ", ".join(f"{n} {e:.1e}" for n, e in errs.items()) + " (tol 1e-10)")
    assert ok


# ------------------------------------------------------------------ 5


def _pair(jet, label):
    br = {b.label: b for b in find_singular_branches(jet)}[label]
    sp = limit_spectrum(br, eps=1e-4)
    return sorted((sp.lam3, sp.lam4)), br.root_at_origin


def test_spectra(fixtures):
    cases = [("J1", "gamma1", [-3.0, 2.0]), ("J4", "zeta1", [-2.0, 1.0])]
    errs = []
    for n, label, want in cases:
        got, _ = _pair(fixtures[n], label)
        errs.append((f"{n} {label}", got, float(np.max(np.abs(np.subtract(got, want))))))
    for label in ("gamma2", "gamma3"):  # the P = -1 and P = +1 branches of J5
        got, root = _pair(fixtures["J5"], label)
        errs.append((f"J5 P={root:+.0f}", got, float(np.max(np.abs(np.subtract(got, [-2.0, 2.0]))))))
    ok = all(e <= 1e-4 for _, _, e in errs)
    record(5, ok, "; ".join(f"{n} ({g[1]:.6f}, {g[0]:.6f}) err {e:.1e}" for n, g, e in errs)
           + " (tol 1e-4)")
    assert ok


# ------------------------------------------------------------------ 6


def test_discriminant_anchors(fixtures):
    t0 = time.perf_counter()
    d1 = branch_discriminant(fixtures["J1"], [0.0], "darboux")[0]
    d5 = branch_discriminant(fixtures["J5"], [0.0], "cardano")[0]
    h = 1e-4
    dp, dm = branch_discriminant(fixtures["J4"], [h, -h], "transition")
    slope = (dp - dm) / (2 * h)
    c12 = chi12(fixtures["J4"])
    elapsed = time.perf_counter() - t0
    ok = (abs(d1 - 32) <= 1e-8 and abs(d5 + 4 / 108) <= 1e-10
          and abs(slope - c12) <= 0.05 * abs(c12) and elapsed < 5)
    record(6, ok, f"D(0) J1 = {d1:.10g} (32), J5 = {d5:.10g} (-4/108), dD/dt J4 = {slope:.5g} "
                  f"vs chi12 = {c12:g}; {elapsed:.2f} s")
    assert ok


# ------------------------------------------------------------------ 7


def _origin_scan(base, ratio_shift, ss):
    kinds, discs = [], []
    for s in ss:
        jet = base.replace(a=ratio_shift * base.b + s)
        kinds.append(classify_point(jet).kind.value)
        discs.append(cubic_discriminant(cubic_coefficients(MongeImmersion(jet), np.zeros(3))))
    return kinds, np.array(discs)


def test_transition_sweeps(fixtures):
    ss = np.linspace(-0.1, 0.1, 21)
    k4, d4 = _origin_scan(fixtures["J4"], 2.0, ss)
    neg, pos = set(k4[:10]), set(k4[11:])
    flip12 = ({"D1"}, {"D2"}) in ((neg, pos), (pos, neg)) and k4[10] == "D12" \
        and np.sign(d4[0]) != np.sign(d4[-1])
    k5, _ = _origin_scan(fixtures["J5"], 1.0, ss)
    flip23 = set(k5[:10]) == {"D3"} and set(k5[11:]) == {"D2"} and k5[10] == "D23"
    imm = MongeImmersion(fixtures["J5"])
    pts = continue_pu_curve(imm, params=ContinuationParams(step=5e-3, n_steps=10))
    pattern = arc_pattern(imm, pts)
    part2 = flip23 and pattern in ("D2|D23|D3", "D3|D23|D2")
    detail = (f"J4 family a = 2b + s: origin {neg} for s<0, {k4[10]} at s=0, {pos} for s>0, "
              f"raw discriminant sign {np.sign(d4[0]):+.0f} -> {np.sign(d4[-1]):+.0f} "
              f"(cubic P(bP^2 - cP + s): discriminant s^2 (c^2 - 4bs) >= 0 for |s| <= 0.1, so no D1 side); "
              f"J5 family a = b + s: origin {k5[0]} -> {k5[10]} -> {k5[-1]}, curve pattern {pattern}")
    record(7, flip12 and part2, detail)
    assert part2
    assert flip12, detail


# ------------------------------------------------------------------ 8


def test_foliation_residuals(fixtures):
    jet = fixtures["J1"]
    rng = np.random.default_rng(8)
    worst = dict(implicit=0.0, e3=0.0, lc=0.0, frechet=0.0)
    for i in range(20):
        u0 = rng.uniform(-0.05, 0.05, 3)
        Lr, Mr, Nr, _, _ = restricted_coefficients(jet, u0)
        P = slope_quadratic_roots([Lr, Mr, Nr]).roots[i % 2]
        orbit = trace_lc_orbit(jet, LCState(u0, P), TraceParams(max_length=0.15),
                               max_projected_length=0.11)
        worst["lc"] = max(worst["lc"], lc_orbit_residual(jet, orbit))
        ref = orbit.points[1] - orbit.points[0]
        best = np.inf
        for which in ("F1", "F2"):
            pl = trace_principal_line(jet, u0, which, TraceParams(max_length=0.11), reference=ref)
            worst["implicit"] = max(worst["implicit"], max(
                implicit_residual(jet, p, t) for p, t in zip(pl.points, pl.tangents)))
            worst["e3"] = max(worst["e3"], max(
                e3_orthogonality(jet, p, t) for p, t in zip(pl.points, pl.tangents)))
            best = min(best, frechet_distance(orbit, pl, 0.1))
        worst["frechet"] = max(worst["frechet"], best)
    tol = dict(implicit=1e-8, e3=1e-7, lc=1e-8, frechet=1e-4)
    ok = all(worst[k] <= tol[k] for k in tol)
    record(8, ok, ", ".join(f"{k} {worst[k]:.1e} (tol {tol[k]:g})" for k in tol) + " over 20 pairs")
    assert ok


# ------------------------------------------------------------------ 9


def test_separatrix_census(fixtures):
    t0 = time.perf_counter()
    counts = {n: sector_census(MongeImmersion(fixtures[n]), np.zeros(3), 1e-2, "F1").counts()
              for n in ("J1", "J2", "J3", "J4")}
    elapsed = time.perf_counter() - t0
    c1, c2, c3, c4 = (counts[n] for n in ("J1", "J2", "J3", "J4"))
    checks = {
        "D1 one separatrix": c1["separatrix_pairs"] == 1 and c1["wedge-like"] == 0,
        "D2 three and one wedge": c2["separatrix_pairs"] == 3 and c2["wedge-like"] == 1,
        "D3 three, no wedge": c3["separatrix_pairs"] == 3 and c3["wedge-like"] == 0,
        "D12 one-sided plus isolated": c4["one-sided"] >= 1 and c4["isolated"] >= 1,
    }
    ok = all(checks.values()) and elapsed < 120
    summary = "; ".join(f"{n}: {c['separatrix_pairs']} separatrices, {c['wedge-like']} wedge, "
                        f"{c['isolated']} isolated, {c['one-sided']} one-sided" for n, c in counts.items())
    record(9, ok, summary + f"; {elapsed:.0f} s")
    assert ok, checks


# ------------------------------------------------------------------ 10


def _linear_part(jet):
    _, grad = gradient(lambda z: np.array([integrability_density(MongeImmersion(jet), z)]),
                       np.zeros(3), False, step=1e-4)
    return np.real(grad[0])


def test_non_integrability():
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(50):
        jet = random_jet(rng)
        got, want = _linear_part(jet), integrability_linear_oracle(jet)
        worst = max(worst, float(np.max(np.abs(got - want)) / np.max(np.abs(want))))
    special = 0.0
    for _ in range(10):
        jet = random_jet(rng)
        jet = jet.replace(q111=0.0, q021=jet.q201)
        special = max(special, float(np.max(np.abs(_linear_part(jet)))),
                      float(np.max(np.abs(integrability_linear_oracle(jet)))))
    ok = worst <= 1e-6 and special <= 1e-6
    record(10, ok, f"max relative error on 50 jets {worst:.1e} (tol 1e-6); "
                   f"max |linear part| with q111=0, q201=q021: {special:.1e}")
    assert ok


# ------------------------------------------------------------------ 11


def test_reduced_identities():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(100):
        jet = random_jet(rng)
        jet = jet.replace(q111=0.0, q021=jet.q201)
        for full, red in ((chi12, chi12_reduced), (chi12star, chi12star_reduced)):
            a, b = full(jet), red(jet)
            worst = max(worst, abs(a - b) / max(1.0, abs(b)))
    ok = worst <= 1e-10
    record(11, ok, f"max relative gap of chi12 and chi12star to their reduced forms {worst:.1e} "
                   f"on 100 jets (tol 1e-10)")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
