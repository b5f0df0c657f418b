"""Principal lines, Lie-Cartan orbits, separatrix leaves and sector censuses.

F1 and F2 are the principal foliations of the coinciding pair of curvatures
(F1 the smaller), traced inside the plane field through the slope quadratic;
F3 is the foliation of the simple curvature.  All line fields are
normalized to unit g-length.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from ._rk import integrate
from .classifier import ContinuationParams, continue_pu_curve
from .errors import (AllCoefficientsZero, DegeneratePlane, NotNormallyHyperbolic,
                     ProjectionFailed, PumbilicError, SeedOnSingularSet)
from .fundamental_forms import compute_forms
from .jet_model import as_immersion
from .lie_cartan import CHART_SWITCH, LCState, lc_field, lc_gradient, lc_value, SingularBranch
from .derivatives import jacobian_fd
from .principal_structure import default_eps_umb, principal_solve
from .restricted_forms import local_geometry, restricted_coefficients, slope_quadratic_roots

__all__ = [
    "TraceParams",
    "Polyline",
    "LeafFamily",
    "SCurve",
    "CensusParams",
    "CensusReport",
    "RayReport",
    "trace_principal_line",
    "trace_lc_orbit",
    "trace_separatrix_family",
    "sector_census",
    "implicit_residual",
    "e3_orthogonality",
    "frechet_distance",
]

Foliation = Literal["F1", "F2", "F3", "LC-orbit"]


@dataclass(frozen=True)
class TraceParams:
    rtol: float = 1e-9
    atol: float = 1e-9
    max_length: float = 0.2
    h0: float = 1e-3
    max_step: float = 5e-3
    gap_step: float = 0.1  # step <= gap_step * (estimated distance to the singular curve)
    near_factor: float = 10.0  # near-S when gap12 < near_factor * eps_umb
    near_distance: float = 0.0  # additionally stop at this distance from a supplied curve
    center: tuple | None = None  # boundary sphere; default: the seed
    radius: float = 0.5
    eps_umb: float | None = None
    max_switches: int = 50


@dataclass
class Polyline:
    foliation: Foliation
    points: np.ndarray  # (n, 3) chart points
    tangents: np.ndarray  # (n, 3) unit tangents of the traced field
    termination: str
    embedded: np.ndarray | None = None  # (n, 4) images in R^4
    slopes: np.ndarray | None = None  # LC orbits: (n,) slope in the chart below
    charts: list | None = None

    def __len__(self) -> int:
        return len(self.points)

    def arclength(self) -> np.ndarray:
        seg = np.linalg.norm(np.diff(self.points, axis=0), axis=1)
        return np.concatenate([[0.0], np.cumsum(seg)])

    @property
    def length(self) -> float:
        return float(self.arclength()[-1])

    def truncated(self, length: float) -> "Polyline":
        """The part up to (chord) arclength ``length``; the last vertex is interpolated."""
        s = self.arclength()
        k = int(np.searchsorted(s, length))
        if k >= len(s):
            return self
        t = (length - s[k - 1]) / (s[k] - s[k - 1])
        end = self.points[k - 1] + t * (self.points[k] - self.points[k - 1])
        tend = self.tangents[k - 1] + t * (self.tangents[k] - self.tangents[k - 1])
        return Polyline(self.foliation, np.vstack([self.points[:k], end]),
                        np.vstack([self.tangents[:k], tend]), self.termination)

    def reversed(self) -> "Polyline":
        flip = lambda a: None if a is None else a[::-1].copy()
        return Polyline(self.foliation, self.points[::-1].copy(), -self.tangents[::-1].copy(),
                        self.termination, flip(self.embedded), flip(self.slopes),
                        None if self.charts is None else self.charts[::-1])

    def tangent_consistency(self) -> float:
        """Largest angle (rad) between a chord and the mean of its end tangents."""
        if len(self.points) < 2:
            return 0.0
        chord = np.diff(self.points, axis=0)
        mid = self.tangents[1:] + self.tangents[:-1]
        keep = np.linalg.norm(chord, axis=1) > 0
        chord, mid = chord[keep], mid[keep]
        cos = np.abs(np.sum(chord * mid, axis=1)) / (np.linalg.norm(chord, axis=1) * np.linalg.norm(mid, axis=1))
        return float(np.max(np.arccos(np.clip(cos, -1.0, 1.0)))) if len(cos) else 0.0


# ------------------------------------------------------------------ direction fields

def _pair_indices(simple: str):
    return (0, 1) if simple == "upper" else (1, 2)


def _gdir(v, g):
    return v / np.sqrt(v @ g @ v)


def _principal_direction(imm, u, which, ref):
    """Unit (g-length) direction of foliation ``which`` at ``u`` closest to ``ref``.

    Returns ``(direction, pair_gap)``.
    """
    geo = local_geometry(imm, u)
    g = np.real(geo.forms.g)
    lam = np.real(geo.forms.lam)
    if which == "F3":
        v = _gdir(np.real(geo.plane.e3_direction), g)
        gap = 0.0
    else:
        U, V = float(np.real(geo.plane.calU)), float(np.real(geo.plane.calV))
        roots = slope_quadratic_roots(geo.restricted)
        cands = [np.array([1.0, P, U + V * P]) for P in roots.roots]
        if roots.infinite:
            cands.append(np.array([0.0, 1.0, V]))
        if not cands:
            raise AllCoefficientsZero("no real principal slope inside the plane field")
        cands = [_gdir(c, g) for c in cands]
        kap = [c @ lam @ c for c in cands]
        if len(cands) == 1:
            v, gap = cands[0], 0.0
        else:
            lo, hi = int(np.argmin(kap)), int(np.argmax(kap))
            gap = float(kap[hi] - kap[lo])
            v = cands[lo] if which == "F1" else cands[hi]
            if ref is not None and gap < 1e-6 * (1 + abs(kap[hi])):
                # curvature order ambiguous: keep the slope closest to the previous one
                v = max(cands, key=lambda c: abs(c @ g @ ref))
    if ref is not None and v @ g @ ref < 0:
        v = -v
    return v, gap


def implicit_residual(imm, u, tangent) -> float:
    """|Lr du2^2 + Mr du1 du2 + Nr du1^2| for the unit (du1, du2) of ``tangent``."""
    Lr, Mr, Nr, _, _ = np.real(restricted_coefficients(as_immersion(imm), u))
    d = np.asarray(tangent[:2], dtype=float)
    d = d / np.linalg.norm(d)
    return float(abs(Lr * d[1] ** 2 + Mr * d[0] * d[1] + Nr * d[0] ** 2))


def e3_orthogonality(imm, u, tangent) -> float:
    """|g(t, e3)| / (|t|_g |e3|_g) with e3 from the generalized eigenproblem."""
    imm = as_immersion(imm)
    fs = compute_forms(imm, u)
    pd = principal_solve(fs)
    e3 = pd.e3 if imm.simple == "upper" else pd.e1
    g = np.real(fs.g)
    t = np.asarray(tangent, dtype=float)
    return float(abs(t @ g @ e3) / np.sqrt((t @ g @ t) * (e3 @ g @ e3)))


# ------------------------------------------------------------------ singular curve

class SCurve:
    """Polyline sample of the partially umbilic curve, for distance queries."""

    def __init__(self, points):
        self.points = np.asarray(points, dtype=float)

    @classmethod
    def through(cls, imm, p, half_length: float, step: float | None = None) -> "SCurve":
        step = step or half_length / 20
        prm = ContinuationParams(step=step, n_steps=int(np.ceil(half_length / step)) + 1, reclassify=False)
        pts = continue_pu_curve(as_immersion(imm), p, prm)
        return cls([q.u for q in pts])

    def closest(self, u):
        """(distance, closest point, unit tangent there)."""
        u = np.asarray(u, dtype=float)
        a, b = self.points[:-1], self.points[1:]
        d = b - a
        t = np.clip(np.sum((u - a) * d, axis=1) / np.sum(d * d, axis=1), 0.0, 1.0)
        proj = a + t[:, None] * d
        dist = np.linalg.norm(proj - u, axis=1)
        i = int(np.argmin(dist))
        return float(dist[i]), proj[i], d[i] / np.linalg.norm(d[i])

    def distance(self, u) -> float:
        return self.closest(u)[0]


# ------------------------------------------------------------------ principal lines

def trace_principal_line(imm, seed, which: str = "F1", params: TraceParams | None = None,
                         curve: SCurve | None = None, reference=None) -> Polyline:
    """Integrate a principal line of foliation ``which`` from ``seed``.

    ``reference`` (a 3-vector) picks the orientation at the seed.  When
    ``curve`` is given the step is also capped by the distance to it and
    ``params.near_distance`` becomes an extra stopping rule.
    """
    params = params or TraceParams()
    imm = as_immersion(imm)
    seed = np.asarray(seed, dtype=float)
    fs = compute_forms(imm, seed)
    pd = principal_solve(fs)
    eps = params.eps_umb if params.eps_umb is not None else default_eps_umb(pd.k3)
    pair_gap = pd.gap12 if imm.simple == "upper" else pd.gap23
    simple_gap = pd.gap23 if imm.simple == "upper" else pd.gap12
    if which in ("F1", "F2") and pair_gap < eps:
        raise SeedOnSingularSet(f"seed within eps_umb of the partially umbilic set (gap {pair_gap:.2e})")
    if which == "F3" and simple_gap < eps:
        raise SeedOnSingularSet(f"seed on the set where the simple curvature stops being simple")
    if which not in ("F1", "F2", "F3"):
        raise ValueError(f"unknown foliation {which!r}")
    center = seed if params.center is None else np.asarray(params.center, dtype=float)

    state = {"gap": pair_gap, "slope": None, "last": None}
    ref0 = None if reference is None else np.asarray(reference, dtype=float)
    v0, _ = _principal_direction(imm, seed, which, ref0)
    if ref0 is None:
        i = int(np.argmax(np.abs(v0)))
        v0 = v0 if v0[i] > 0 else -v0

    def rhs(y, ref):
        v, gap = _principal_direction(imm, y, which, ref)
        state["gap"] = gap
        return v, v

    def cap(y):
        h = params.max_step
        if which != "F3":
            if curve is not None:
                h = min(h, params.gap_step * curve.distance(y))
            elif state["slope"]:
                h = min(h, params.gap_step * state["gap"] / state["slope"])
        return max(h, 1e-13)

    def stop(y):
        gap = state["gap"]
        if state["last"] is not None:
            du = np.linalg.norm(y - state["last"][0])
            if du > 0:
                sl = abs(gap - state["last"][1]) / du
                state["slope"] = max(sl, state["slope"] or 0.0)
        state["last"] = (y.copy(), gap)
        if which != "F3" and gap < params.near_factor * eps:
            return "near-S"
        if curve is not None and params.near_distance > 0 and curve.distance(y) < params.near_distance:
            return "near-S"
        if np.linalg.norm(y - center) > params.radius:
            return "boundary"
        return None

    tol_scale = None
    if curve is not None:
        # errors relative to the distance from the curve, where the field turns fastest
        tol_scale = lambda y: min(1.0, max(curve.distance(y), 1e-300) / params.radius)
    ys, ts, reason = _run_guarded(rhs, seed, v0, params, cap, stop, tol_scale)
    pts = np.array(ys)
    return Polyline(which, pts, np.array(ts), reason, embedded=_embed(imm, pts))


def _run_guarded(rhs, seed, v0, params, cap, stop, tol_scale=None):
    """Integrate, treating a failed field evaluation (at the curve itself) as near-S."""
    failed = {"flag": False}

    def safe_rhs(y, ref):
        try:
            return rhs(y, ref)
        except (AllCoefficientsZero, DegeneratePlane):
            failed["flag"] = True
            return ref, ref

    def safe_stop(y):
        if failed["flag"]:
            return "near-S"
        return stop(y)

    res = integrate(safe_rhs, seed, v0, params.max_length, rtol=params.rtol, atol=params.atol,
                    h0=params.h0, max_step=cap, stop=safe_stop, tol_scale=tol_scale)
    return res.ys, res.tangents, res.reason


def _embed(imm, pts):
    return np.array([np.real(imm.point(p)) for p in pts])


# ------------------------------------------------------------------ Lie-Cartan orbits

def _project_to_surface(imm, x, chart, scale, tol=1e-13, max_iter=4):
    for _ in range(max_iter):
        st = LCState(x[:3], x[3], chart)
        val = lc_value(imm, st)
        if abs(val) <= tol * scale:
            return x
        grad = lc_gradient(imm, st)
        x = x - val * grad / (grad @ grad)
    if abs(lc_value(imm, LCState(x[:3], x[3], chart))) > 1e-8 * scale:
        raise ProjectionFailed(f"could not return to the Lie-Cartan surface at {x}")
    return x


def trace_lc_orbit(imm, state0: LCState, params: TraceParams | None = None, backward: bool = False,
                   max_projected_length: float | None = None, tol: float = 1e-8,
                   slope_weight: float = 1e-3) -> Polyline:
    """Orbit of the Lie-Cartan field on L = 0, projected back after every step.

    The field is normalized to unit length in the metric
    ``|du|_g^2 + (slope_weight * dslope)^2``, so time is close to projected
    arclength away from the fibres over the singular curve.  The orbit stops at a zero of the field ("near-S"), at the boundary sphere,
    at ``params.max_length`` or, if set, once its projection to u-space has
    length ``max_projected_length``.
    """
    params = params or TraceParams()
    imm = as_immersion(imm)
    st = state0.hygienic()
    x = st.vector()
    chart = st.chart
    grad = lc_gradient(imm, st)
    scale = max(1.0, float(np.linalg.norm(grad)))
    if abs(lc_value(imm, st)) > tol * scale * 1e3:
        raise ProjectionFailed("initial state is not on the Lie-Cartan surface")
    x = _project_to_surface(imm, x, chart, scale)
    center = x[:3].copy() if params.center is None else np.asarray(params.center, dtype=float)
    sign = -1.0 if backward else 1.0
    fscale = float(np.linalg.norm(lc_field(imm, LCState(x[:3], x[3], chart)))) or 1.0

    pts, tans, slopes, charts = [x[:3].copy()], [], [x[3]], [chart]
    remaining = params.max_length
    projected = 0.0
    switches = 0
    reason = "max-length"
    while True:
        local = {"proj": projected, "prev": x[:3].copy(), "zero": False}

        def rhs(y, ref, chart=chart):
            X = sign * lc_field(imm, LCState(y[:3], y[3], chart))
            g = np.real(compute_forms(imm, y[:3]).g)
            n = np.sqrt(X[:3] @ g @ X[:3] + (slope_weight * X[3]) ** 2)
            if n <= 1e-12 * fscale:
                local["zero"] = True
                return np.zeros(4), ref
            return X / n, X / n

        def stop(y, chart=chart):
            local["proj"] += float(np.linalg.norm(y[:3] - local["prev"]))
            local["prev"] = y[:3].copy()
            if local["zero"]:
                return "near-S"
            if abs(y[3]) > CHART_SWITCH:
                return "chart-switch"
            if max_projected_length is not None and local["proj"] >= max_projected_length:
                return "max-length"
            if np.linalg.norm(y[:3] - center) > params.radius:
                return "boundary"
            return None

        X0 = sign * lc_field(imm, LCState(x[:3], x[3], chart))
        if np.linalg.norm(X0) <= 1e-12 * fscale:
            reason = "near-S"
            tans.append(np.zeros(3))
            break
        res = integrate(rhs, x, rhs(x, X0)[1], remaining, rtol=params.rtol, atol=params.atol,
                        h0=params.h0, max_step=params.max_step,
                        project=lambda y, chart=chart: _project_to_surface(imm, y, chart, scale), stop=stop)
        seg = res.ys
        for i, y in enumerate(seg[1:], start=1):
            pts.append(y[:3].copy())
            slopes.append(y[3])
            charts.append(chart)
        tans.extend(t[:3] for t in res.tangents[:-1])
        remaining -= res.ts[-1]
        projected = local["proj"]
        x = seg[-1]
        if res.reason != "chart-switch":
            reason = res.reason
            tans.append(res.tangents[-1][:3])
            break
        old = lc_field(imm, LCState(x[:3], x[3], chart))
        x = np.append(x[:3], 1.0 / x[3])
        chart = "Q" if chart == "P" else "P"
        new = lc_field(imm, LCState(x[:3], x[3], chart))
        old_mapped = np.append(old[:3], -old[3] / (1.0 / x[3]) ** 2)
        if new @ old_mapped < 0:
            sign = -sign
        switches += 1
        if switches > params.max_switches:
            reason = "chart-switch-limit"
            tans.append(res.tangents[-1][:3])
            break
        if remaining <= 0:
            tans.append(res.tangents[-1][:3])
            break
    pts = np.array(pts)
    tans = np.array([t / np.linalg.norm(t) if np.linalg.norm(t) > 0 else t for t in tans])
    return Polyline("LC-orbit", pts, tans, reason, embedded=_embed(imm, pts),
                    slopes=np.array(slopes), charts=charts)


def lc_orbit_residual(imm, orbit: Polyline) -> float:
    """max |L| along an orbit."""
    return max(abs(lc_value(imm, LCState(p, s, c))) for p, s, c in zip(orbit.points, orbit.slopes, orbit.charts))


# ------------------------------------------------------------------ separatrix leaves

@dataclass
class LeafFamily:
    branch: str
    leaves: list
    side: str  # "stable" or "unstable": the eigen-direction the leaves were shot along
    nh_type: str
    partial: bool = False
    flagged: list = field(default_factory=list)  # indices of leaves failing the approach check
    sensitivity: list = field(default_factory=list)  # endpoint shift under halving of the displacement
    arrival: list = field(default_factory=list)  # unit (u-space) leaf directions at the curve


def _eigen_split(imm, state: LCState, step=1e-6):
    """Nonzero eigenpairs of DX at a singular point, tagged fiber/transverse."""
    J = jacobian_fd(lambda x: lc_field(imm, LCState(x[:3], x[3], state.chart)), state.vector(), step)
    w, V = np.linalg.eig(J)
    order = np.argsort(-np.abs(w))
    out = []
    norm = np.linalg.norm(J, 2)
    for i in order[:2]:
        v = np.real(V[:, i])
        v = v / np.linalg.norm(v)
        out.append((float(np.real(w[i])), v, float(np.linalg.norm(v[:3]))))
    return out, norm


def _approach_monotone(leaf: Polyline, curve: SCurve) -> bool:
    s = leaf.arclength()
    tail = s >= 0.9 * s[-1]
    d = np.array([curve.distance(p) for p in leaf.points[tail]])
    return bool(np.all(np.diff(d) <= 1e-12))


def trace_separatrix_family(branch: SingularBranch, n_leaves: int = 16, params: TraceParams | None = None,
                            displacement: float = 1e-5, length: float = 0.05,
                            allow_partial: bool = False, span: float = 0.8) -> LeafFamily:
    """Leaves of the separatrix surface attached to a branch of singular points.

    At each of ``n_leaves`` branch points the orbits leaving along the
    transverse eigenvector (both senses) are integrated away from the branch
    (backward in time for a stable direction) and projected to u-space.  Each
    leaf is returned oriented towards the singular curve.
    """
    imm = branch.imm
    params = params or TraceParams(max_length=length)
    params = replace(params, max_length=length)
    nh = branch.nh_type
    partial = False
    if nh not in ("saddle", "attractor", "repeller"):
        if not allow_partial:
            raise NotNormallyHyperbolic(f"branch {branch.label} is {nh}: the center direction has no "
                                        "hyperbolic separatrix; pass allow_partial for the strong family")
        partial = True
    grid = branch.params
    lo, hi = span * grid.min(), span * grid.max()
    ss = np.linspace(lo, hi, n_leaves) if n_leaves > 1 else np.array([0.0])
    curve = SCurve([branch.state_at(s).u for s in np.linspace(grid.min(), grid.max(), 4 * len(grid))])
    leaves, sens, arrival = [], [], []
    side = None
    for s in ss:
        st = branch.state_at(s)
        pairs, norm = _eigen_split(imm, st)
        trans = [p for p in pairs if p[2] > 1e-3 and abs(p[0]) > 1e-6 * norm]
        if not trans:
            continue
        lam, v, _ = max(trans, key=lambda p: p[2])
        backward = lam < 0
        side = "stable" if backward else "unstable"
        for sgn in (1.0, -1.0):
            def shoot(eps):
                x0 = st.vector() + sgn * eps * v
                start = LCState(x0[:3], x0[3], st.chart)
                return trace_lc_orbit(imm, start, params, backward=backward, tol=1.0)
            try:
                orb = shoot(displacement)
                half = shoot(displacement / 2)
            except PumbilicError:
                continue
            # the half-displacement leaf ends slightly behind; its end should lie on this leaf
            sens.append(SCurve(orb.points).distance(half.points[-1]) if len(orb.points) > 1 else np.inf)
            leaf = orb.reversed()
            leaf = Polyline(_leaf_foliation(imm, leaf), leaf.points, leaf.tangents, leaf.termination,
                            leaf.embedded, leaf.slopes, leaf.charts)
            leaves.append(leaf)
            d = leaf.points[-1] - leaf.points[-min(5, len(leaf.points))]
            arrival.append(d / np.linalg.norm(d) if np.linalg.norm(d) > 0 else d)
    fam = LeafFamily(branch=branch.label, leaves=leaves, side=side or "none", nh_type=nh, partial=partial,
                     sensitivity=sens, arrival=arrival)
    fam.flagged = [i for i, lf in enumerate(leaves) if not _approach_monotone(lf, curve)]
    fam.curve = curve
    return fam


def _leaf_foliation(imm, leaf: Polyline) -> str:
    """F1 or F2, read from the normal curvature of the leaf at its far end."""
    u = leaf.points[0]
    t = leaf.tangents[0]
    fs = compute_forms(imm, u)
    pd = principal_solve(fs)
    i, j = _pair_indices(imm.simple)
    g, lam = np.real(fs.g), np.real(fs.lam)
    kap = (t @ lam @ t) / (t @ g @ t)
    ks = pd.curvatures
    return "F1" if abs(kap - ks[i]) <= abs(kap - ks[j]) else "F2"


# ------------------------------------------------------------------ sector census

@dataclass(frozen=True)
class CensusParams:
    n_seeds: int = 64
    approach_distance: float = 1e-4
    bin_deg: float = 5.0
    exit_factor: float = 2.0  # traces leave at exit_factor * radius
    bisect_iter: int = 40
    jump_deg: float = 30.0  # winding difference (deg) that separates the two sides of a separatrix
    length_factor: float = 12.0  # max trace length in units of the radius
    stop_fraction: float = 1e-3  # traces stop at stop_fraction * approach_distance from the curve
    ray_fraction: float = 0.25  # radial rays are located on a ring of ray_fraction * radius
    side_deg: float = 1.0  # angular offset of the two probes beside a ray
    ray_samples: int = 720


@dataclass
class RayReport:
    angle_deg: float  # seed angle on the ray ring
    kind: str  # "isolated", "one-sided", "open" or "not-asymptotic"
    dmin: float  # closest approach found for the ray
    tangent_traces: int = 0  # approaching ring traces that end tangent to the ray


@dataclass
class CensusReport:
    separatrix_hits: int  # asymptotic directions (rays of any kind except not-asymptotic)
    hyperbolic: int
    wedge_like: int  # runs of approaching ring seeds
    isolated: int
    one_sided: int
    rays: list  # RayReport per radial direction of the line field
    wedges_deg: list  # (first, last) seed angle of each run
    arrivals_deg: list  # clustered arrival directions of approaching ring traces
    outcomes: list  # per ring seed: "approach" or "exit"
    thresholds: dict

    def counts(self) -> dict:
        return {"separatrix_pairs": self.separatrix_hits,
                "separatrix_hits": self.separatrix_hits, "hyperbolic": self.hyperbolic,
                "wedge-like": self.wedge_like, "isolated": self.isolated, "one-sided": self.one_sided}


def _disc_basis(imm, p):
    geo = local_geometry(imm, p)
    U, V = float(np.real(geo.plane.calU)), float(np.real(geo.plane.calV))
    a = np.array([1.0, 0.0, U])
    a /= np.linalg.norm(a)
    b = np.array([0.0, 1.0, V])
    b -= (b @ a) * a
    b /= np.linalg.norm(b)
    return a, b


def _angdiff(x, y):
    return abs((x - y + 180.0) % 360.0 - 180.0)


def sector_census(imm, p, radius: float = 1e-2, which: str = "F1",
                  params: CensusParams | None = None) -> CensusReport:
    """Heuristic count of separatrices and sectors of ``which`` around the curve at ``p``.

    Seeds lie in the plane-field disc at ``p``; every trace runs towards the
    curve and either ends on it or leaves the disc of radius
    ``exit_factor * radius``.

    * Ring seeds at ``radius``: runs of consecutive approaching seeds are
      wedge-like (open) sets of asymptotic traces.
    * Radial rays: directions on a smaller ring where the line field points
      at the curve.  Probes ``side_deg`` to either side tell the ray apart:
      both approach ("open", inside a wedge), one approaches ("one-sided",
      the edge of an open set), or both leave, winding around the curve in
      different ways, in which case bisection between them must reach ``approach_distance``
      ("isolated") or the ray is "not-asymptotic".
    * Hyperbolic sectors are the exit arcs left between wedges and isolated
      separatrices.
    """
    cp = params or CensusParams()
    imm = as_immersion(imm)
    p = np.asarray(p, dtype=float)
    curve = SCurve.through(imm, p, half_length=4 * cp.exit_factor * radius, step=radius / 4)
    _, p_on, tan = curve.closest(p)
    a, b = _disc_basis(imm, p)
    tp = TraceParams(max_length=cp.length_factor * radius, max_step=radius / 10, center=tuple(p),
                     radius=cp.exit_factor * radius, near_distance=cp.stop_fraction * cp.approach_distance,
                     gap_step=0.2, near_factor=0.0)

    normal = np.cross(a, b)

    def polar(vec):
        # slide along the curve onto the disc plane, then read the angle there
        vec = vec - (vec @ normal) / (tan @ normal) * tan
        return float(np.degrees(np.arctan2(vec @ b, vec @ a)) % 360.0)

    def seed_at(phi, r):
        return p + r * (np.cos(phi) * a + np.sin(phi) * b)

    def run(phi, r=radius):
        seed = seed_at(phi, r)
        _, foot, _ = curve.closest(seed)
        try:
            v, _ = _principal_direction(imm, seed, which, foot - seed)
            pl = trace_principal_line(imm, seed, which, tp, curve=curve, reference=v)
        except PumbilicError:
            return {"outcome": "approach", "exit": None, "arrival": None, "dmin": 0.0}
        dists = np.array([curve.distance(q) for q in pl.points])
        if pl.termination == "near-S":
            # direction from the curve to the trace at its end
            _, foot, _ = curve.closest(pl.points[-1])
            return {"outcome": "approach", "exit": None, "arrival": polar(pl.points[-1] - foot),
                    "dmin": float(dists.min())}
        ang = np.unwrap(np.radians([polar(q - p_on) for q in pl.points]))
        return {"outcome": "exit", "exit": float(np.degrees(ang[-1] - ang[0])), "arrival": None,
                "dmin": float(dists.min())}

    # ring runs
    n = cp.n_seeds
    phis = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
    ring = [run(f) for f in phis]
    outc = [r["outcome"] for r in ring]
    wedges = [w for w in _circular_runs(outc, "approach", phis) if w[2] >= 2]

    # radial rays of the line field on the inner ring
    r_ray = cp.ray_fraction * radius

    def radiality(phi):
        seed = seed_at(phi, r_ray)
        _, foot, _ = curve.closest(seed)
        inward = foot - seed
        try:
            v, _ = _principal_direction(imm, seed, which, inward)
        except PumbilicError:
            return 0.0
        w = inward / np.linalg.norm(inward)
        v = v - (v @ tan) * tan
        # signed sine of the angle between the field (made inward) and the radial direction
        return float(np.cross(w, v / np.linalg.norm(v)) @ tan)

    grid = np.linspace(0.0, 2 * np.pi, cp.ray_samples + 1)
    vals = np.array([radiality(f) for f in grid])
    ray_phis = _sign_changes(radiality, grid, vals)
    ray_phis += _touch_points(radiality, grid, vals, ray_phis)

    ray_phis = _dedupe(sorted(x % (2 * np.pi) for x in ray_phis), np.radians(0.5))
    ray_deg = [float(np.degrees(f)) for f in ray_phis]

    # ring traces ending tangent to each ray
    arrivals = [(k, r["arrival"]) for k, r in enumerate(ring) if r["arrival"] is not None]
    tangent = {i: [] for i in range(len(ray_deg))}
    for k, arr in arrivals:
        if ray_deg:
            i = min(range(len(ray_deg)), key=lambda m: _angdiff(arr, ray_deg[m]))
            if _angdiff(arr, ray_deg[i]) <= cp.bin_deg:
                tangent[i].append(float(np.degrees(phis[k])))

    rays = []
    side = np.radians(cp.side_deg)
    for i, fr in enumerate(ray_phis):
        deg = ray_deg[i]
        seeds = tangent[i]
        if len(seeds) >= 2:
            signs = {np.sign((x - deg + 180.0) % 360.0 - 180.0) for x in seeds if _angdiff(x, deg) > cp.side_deg}
            kind = "open" if len(signs) == 2 else "one-sided"
            rays.append(RayReport(deg, kind, 0.0, len(seeds)))
            continue
        lo, hi = run(fr - side, r_ray), run(fr + side, r_ray)
        if "approach" in (lo["outcome"], hi["outcome"]):
            rays.append(RayReport(deg, "isolated", min(lo["dmin"], hi["dmin"]), len(seeds)))
        elif abs(lo["exit"] - hi["exit"]) < cp.jump_deg:
            rays.append(RayReport(deg, "not-asymptotic", min(lo["dmin"], hi["dmin"]), len(seeds)))
        else:
            dmin = _bisect_separatrix(run, fr - side, fr + side, lo, r_ray, cp)
            kind = "isolated" if dmin < cp.approach_distance else "not-asymptotic"
            rays.append(RayReport(deg, kind, dmin, len(seeds)))

    isolated = sum(r.kind == "isolated" for r in rays)
    one_sided = sum(r.kind == "one-sided" for r in rays)
    hits = sum(r.kind != "not-asymptotic" for r in rays)
    hyperbolic = _hyperbolic_sectors(outc, phis, wedges, rays)
    return CensusReport(separatrix_hits=hits, hyperbolic=hyperbolic, wedge_like=len(wedges),
                        isolated=isolated, one_sided=one_sided, rays=rays,
                        wedges_deg=[(w[0], w[1]) for w in wedges],
                        arrivals_deg=_cluster([a for _, a in arrivals], cp.bin_deg), outcomes=outc,
                        thresholds={"approach_distance": cp.approach_distance, "bin_deg": cp.bin_deg,
                                    "jump_deg": cp.jump_deg, "side_deg": cp.side_deg,
                                    "radius": radius, "ray_radius": r_ray, "n_seeds": n})


def _dedupe(xs, tol):
    out = []
    for x in xs:
        if not out or x - out[-1] > tol:
            out.append(x)
    if len(out) > 1 and out[0] + 2 * np.pi - out[-1] <= tol:
        out.pop()
    return out


def _hyperbolic_sectors(outc, phis, wedges, rays):
    """Exit arcs of the ring, cut by isolated separatrices lying inside them.

    Single approaching seeds are hits on isolated separatrices and count as
    exit arcs here.
    """
    n = len(outc)
    in_wedge = [False] * n
    for first, last, _ in wedges:
        for k in range(n):
            if _in_arc(np.degrees(phis[k]), first, last):
                in_wedge[k] = True
    if all(in_wedge):
        return 0
    iso = [r.angle_deg for r in rays if r.kind == "isolated"]
    if not any(in_wedge):
        return max(len(iso), 1 if iso else 0)
    exit_runs = _circular_runs(["exit" if not w else "wedge" for w in in_wedge], "exit", phis)
    total = 0
    for first, last, _ in exit_runs:
        inside = [x for x in iso if _in_arc(x, first, last) and _angdiff(x, first) > 1e-9 and _angdiff(x, last) > 1e-9]
        total += 1 + len(inside)
    return total


def _circular_runs(labels, target, phis):
    """Maximal circular runs of ``target``: (first deg, last deg, length)."""
    n = len(labels)
    if all(x == target for x in labels):
        return [(0.0, 360.0, n)]
    start = next(i for i in range(n) if labels[i] != target)
    runs, cur = [], []
    for k in range(1, n + 1):
        i = (start + k) % n
        if labels[i] == target:
            cur.append(i)
        elif cur:
            runs.append(cur)
            cur = []
    if cur:
        runs.append(cur)
    return [(float(np.degrees(phis[r[0]])), float(np.degrees(phis[r[-1]])), len(r)) for r in runs]


def _in_arc(x, first, last):
    return (x - first) % 360.0 <= (last - first) % 360.0


def _sign_changes(f, grid, vals):
    import scipy.optimize
    out = []
    for k in range(len(grid) - 1):
        if vals[k] == 0.0:
            out.append(float(grid[k]))
        elif vals[k] * vals[k + 1] < 0:
            # the field direction flips sign across a tangency to the ring; radial zeros are small there
            if max(abs(vals[k]), abs(vals[k + 1])) > 0.5:
                continue
            out.append(float(scipy.optimize.brentq(f, grid[k], grid[k + 1], xtol=1e-13)))
    return [x for x in out if x < 2 * np.pi - 1e-12]


def _touch_points(f, grid, vals, found, rel=1e-3):
    """Local minima of |radiality| that touch zero without a sign change (double roots)."""
    import scipy.optimize
    out = []
    av = np.abs(vals)
    for k in range(1, len(grid) - 1):
        if av[k] <= av[k - 1] and av[k] <= av[k + 1] and vals[k - 1] * vals[k + 1] > 0:
            if any(abs(grid[k] - x) < 2 * (grid[1] - grid[0]) for x in found):
                continue
            res = scipy.optimize.minimize_scalar(lambda t: abs(f(t)), bounds=(grid[k - 1], grid[k + 1]),
                                                 method="bounded", options={"xatol": 1e-12})
            if res.fun < rel * max(av.max(), 1e-300) * (grid[1] - grid[0]):
                out.append(float(res.x))
    return out


def _bisect_separatrix(run, f0, f1, r0, r, cp):
    """Closest approach reached while bisecting between probes that exit on different sides."""
    dmin = r0["dmin"]
    for _ in range(cp.bisect_iter):
        fm = 0.5 * (f0 + f1)
        rm = run(fm, r)
        dmin = min(dmin, rm["dmin"])
        if rm["outcome"] == "approach" or dmin < cp.stop_fraction * cp.approach_distance * 10:
            return dmin
        if abs(rm["exit"] - r0["exit"]) < cp.jump_deg:
            f0, r0 = fm, rm
        else:
            f1 = fm
    return dmin


def _cluster(angles, bin_deg):
    """Group circular angles (deg) whose neighbours are closer than ``bin_deg``."""
    if not angles:
        return []
    a = np.sort(np.asarray(angles) % 360.0)
    groups = [[a[0]]]
    for x in a[1:]:
        if x - groups[-1][-1] <= bin_deg:
            groups[-1].append(x)
        else:
            groups.append([x])
    if len(groups) > 1 and groups[0][0] + 360.0 - groups[-1][-1] <= bin_deg:
        groups[0] = [x - 360.0 for x in groups[-1]] + groups[0]
        groups.pop()
    return [float(np.mean(g) % 360.0) for g in groups]


def _hermite(p0, p1, m0, m1, tau):
    t = tau[:, None]
    return ((2 * t**3 - 3 * t**2 + 1) * p0 + (t**3 - 2 * t**2 + t) * m0
            + (-2 * t**3 + 3 * t**2) * p1 + (t**3 - t**2) * m1)


def _densify(line) -> np.ndarray:
    """Vertices of a polyline refined by cubic Hermite arcs through the stored tangents."""
    if not isinstance(line, Polyline):
        return np.asarray(line, dtype=float)
    pts, tan = line.points, line.tangents
    tau = np.linspace(0.0, 1.0, 33)
    dense = [pts[:1]]
    for k in range(len(pts) - 1):
        h = np.linalg.norm(pts[k + 1] - pts[k])
        t0 = tan[k] / np.linalg.norm(tan[k])
        t1 = tan[k + 1] / np.linalg.norm(tan[k + 1])
        if t0 @ (pts[k + 1] - pts[k]) < 0:
            t0, t1 = -t0, -t1
        dense.append(_hermite(pts[k], pts[k + 1], h * t0, h * t1, tau)[1:])
    return np.vstack(dense)


def _resample(pts, n, length=None):
    s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))])
    t = np.linspace(0.0, s[-1] if length is None else min(length, s[-1]), n)
    return np.stack([np.interp(t, s, pts[:, k]) for k in range(pts.shape[1])], axis=1)


def frechet_distance(a, b, length: float | None = None, n: int = 2001) -> float:
    """Upper bound on the Frechet distance of two curves.

    ``a`` and ``b`` are point arrays or :class:`Polyline` objects (refined
    with their tangents).  With ``length`` both are cut at that arclength.
    They are parametrized proportionally to arclength and compared
    pointwise, which is one admissible reparametrization; for nearly
    coincident curves the bound is tight.
    """
    da, db = _densify(a), _densify(b)
    return float(np.max(np.linalg.norm(_resample(da, n, length) - _resample(db, n, length), axis=1)))
