"""Type of a partially umbilic point and continuation of the partially umbilic curve.

The point types are decided from the adapted cubic coefficients (a, b, c)
and, on the codimension-one boundaries, from the transversality
coefficients chi12, chi12star and chi23, which are evaluated literally from
their closed polynomial forms.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import (DegeneratePlane, JacobianRankDrop, NewtonDiverged,
                     NotPositiveDefinite, PumbilicError, RankDeficient)
from .jet_model import MongeJet, adapt_rotation, as_immersion

__all__ = [
    "PUKind",
    "PUClassification",
    "classify_point",
    "chi12",
    "chi12star",
    "chi23",
    "chi12_reduced",
    "chi12star_reduced",
    "d23_regularity",
    "CurvePoint",
    "ContinuationParams",
    "plane_omega",
    "continue_pu_curve",
    "fit_local_jet",
    "curve_plane_contact",
    "ContactReport",
    "arc_pattern",
    "curve_coefficients_d12_oracle",
    "curve_coefficients_d23_oracle",
]


class PUKind(str, enum.Enum):
    D1 = "D1"
    D2 = "D2"
    D3 = "D3"
    D12 = "D12"
    D23 = "D23"
    UMBILIC = "Umbilic"
    NONGENERIC = "NonGeneric"


@dataclass(frozen=True)
class PUClassification:
    kind: PUKind
    reason: str = ""
    invariants: dict = field(default_factory=dict)
    margin: float = float("inf")  # relative distance to the nearest decision boundary

    def __str__(self) -> str:
        if self.kind is PUKind.NONGENERIC:
            return f"NonGeneric({self.reason})"
        return self.kind.value

    @property
    def label(self) -> str:
        return str(self)


# ------------------------------------------------------------------ invariants

def chi12(j: MongeJet) -> float:
    """Transversality coefficient at the a = 2b boundary."""
    k, k3, b, c = j.k, j.k3, j.b, j.c
    q012, q021, q102, q111, q201 = j.q012, j.q021, j.q102, j.q111, j.q201
    return ((k - k3) * ((b * q021 - b * q201 - c * q111) * j.B - b * q111 * j.C + b**2 * j.Q211)
            + q012 * q201 * b**2 + (2 * q102 * b**2 - b * k**3 * k3 + b * k**4) * q111
            - 3 * c * q111**2 * q201 - 3 * b * q111 * q201**2 - 2 * b * q111**3
            + 2 * b * q111 * q021 * q201)


def chi12star(j: MongeJet) -> float:
    """Transversality coefficient at the a/b = (c/2b)^2 + 2 boundary (chi11 + chi22)."""
    k, k3, b, c = j.k, j.k3, j.b, j.c
    q012, q021, q102, q111, q201 = j.q012, j.q021, j.q102, j.q111, j.q201
    A, B, C, D, E = j.A, j.B, j.C, j.D, j.E
    s = 4 * b**2 + c**2
    # the C bracket is read as multiplying all three of its terms
    chi11 = (k - k3) * (
        16 * b**3 * c * (-b * q201 + b * q021 - q111 * c) * A
        - 4 * b**2 * (5 * c**3 * q111 - 8 * b**3 * q201 + 8 * b**3 * q021 - 4 * b**2 * c * q111
                      - 4 * b * c**2 * q021 + 4 * b * c**2 * q201) * B
        + (4 * b * (8 * b**2 - 2 * c**2) * (b**2 + c**2) * q111 - b * c * (8 * b**2 - c**2) * q021
           + b * c * (8 * b**2 - c**2) * q201) * C
        + c * (-c**4 * q111 + 8 * b**3 * c * q201 + 32 * b**4 * q111 - 8 * b**3 * c * q021
               + 12 * b**2 * c**2 * q111) * D
        + 2 * b * c**2 * q111 * s * E
        - b * c * s * (8 * b**2 - c**2) * j.Q121
        - 4 * b**2 * s * (2 * b**2 - c**2) * j.Q211
        - 2 * b**2 * c**2 * s * j.Q031
        + 4 * b**3 * c * s * j.Q301)
    chi22 = (4 * b**2 * c * k**3 * s * (k - k3) * q201
             - 4 * b**2 * c * k**3 * s * (k - k3) * q021
             - 2 * b * k**3 * (4 * b**2 - c**2) * s * (k - k3) * q111
             - 4 * b**2 * s * (2 * b**2 - c**2) * q201 * q012
             - 6 * b**2 * c**2 * s * q012 * q021
             - b * c * s * (8 * b**2 - c**2) * q021 * q102
             - 8 * b**2 * s * (2 * b**2 - c**2) * q111 * q102
             + 12 * b**3 * c * s * q102 * q201
             - 2 * b * c * s * (8 * b**2 - c**2) * q111 * q012
             - 48 * b**4 * c * q201**3
             + 4 * b**2 * c * (-17 * c**2 + 28 * b**2) * q111**2 * q201
             + c * (44 * b**2 * c**2 + 32 * b**4 - 3 * c**4) * q111**2 * q021
             + 16 * b * (2 * b - c) * (2 * b + c) * (b**2 + c**2) * q111**3
             - 8 * b * (8 * b**4 - 12 * b**2 * c**2 + c**4) * q021 * q201 * q111
             + 96 * b**3 * (b - c) * (b + c) * q201**2 * q111
             + 6 * b * c**4 * q021**2 * q111
             - 4 * b**2 * c * (8 * b**2 - c**2) * q201 * q021**2
             + 4 * b**2 * c * (-c**2 + 20 * b**2) * q201**2 * q021)
    return chi11 + chi22


def chi12_reduced(j: MongeJet) -> float:
    """chi12 in closed form when q111 = 0 and q201 = q021."""
    return j.b**2 * (-j.k3 * j.Q211 + j.k * j.Q211 + j.q012 * j.q021)


def chi12star_reduced(j: MongeJet) -> float:
    """chi12star in closed form when q111 = 0 and q201 = q021."""
    b, c, dk = j.b, j.c, j.k - j.k3
    s = 4 * b**2 + c**2
    return (-4 * b**2 * s * (2 * b**2 - c**2) * dk * j.Q211
            - b * c * s * (8 * b**2 - c**2) * dk * j.Q121
            + 4 * b**3 * c * s * dk * j.Q301
            - 2 * b**2 * c**2 * s * dk * j.Q031
            - b * j.q021 * s**2 * (2 * j.q012 * b - j.q102 * c))


def chi23(j: MongeJet) -> float:
    k, k3, b, c = j.k, j.k3, j.b, j.c
    return ((k - k3) * (b * j.A + c * j.B - b * j.C - 2 * b * k**3)
            + (3 * j.q201**2 - j.q201 * j.q021 - 2 * j.q111**2) * b + 3 * j.q111 * j.q201 * c)


def d23_regularity(j: MongeJet) -> float:
    """b(q201 - q021) + c q111, nonzero when the curve is regular at a D23 point."""
    return j.b * (j.q201 - j.q021) + j.c * j.q111


# ------------------------------------------------------------------ classification

def classify_point(jet: MongeJet, tol: float = 1e-9, eps_umb: float | None = None) -> PUClassification:
    """Type of the origin of an adapted jet (d = 0)."""
    j = jet
    a, b, c = j.a, j.b, j.c
    cub = max(abs(a), abs(b), abs(c), 1e-300)
    quad = c**2 - 4 * b * (a - 2 * b)
    # C(0, P) = P (b P^2 - c P + a - 2b); its discriminant over -b^4 (positive: one real root)
    cubic_disc = -(a - 2 * b) ** 2 * quad / b**4 if b != 0 else float("nan")
    inv = dict(T=b * (b - a), disc=cubic_disc, quad_disc=quad, chi12=chi12(j),
               chi12star=chi12star(j), chi23=chi23(j), d23_regularity=d23_regularity(j))
    eps = 1e-8 * (1 + abs(j.k3)) if eps_umb is None else eps_umb
    if abs(j.k - j.k3) <= eps:
        return PUClassification(PUKind.UMBILIC, "k = k3", inv, abs(j.k - j.k3))
    if abs(j.d) > tol * cub:
        return PUClassification(PUKind.NONGENERIC, "jet not adapted (d != 0)", inv, 0.0)

    def nongeneric(reason, m=0.0):
        return PUClassification(PUKind.NONGENERIC, reason, inv, m)

    if abs(b) <= tol * cub:
        return nongeneric("T fails: b = 0")
    ratio = a / b
    # D23: a = b
    if abs(a - b) <= tol * cub:
        reg = inv["d23_regularity"]
        if abs(reg) <= tol * max(1.0, abs(b) * (abs(j.q201) + abs(j.q021)) + abs(c * j.q111)):
            return nongeneric("regularity b(q201 - q021) + c q111 = 0 at a = b")
        if abs(inv["chi23"]) <= tol * max(1.0, j.scale() ** 3):
            return nongeneric("chi23 = 0 at a = b")
        return PUClassification(PUKind.D23, "", inv, abs(a - b) / cub)
    # D12, pattern a = 2b
    if abs(a - 2 * b) <= tol * cub:
        if abs(c) <= tol * cub:
            return nongeneric("c=0 at a=2b")
        if abs(inv["chi12"]) <= tol * max(1.0, j.scale() ** 3):
            return nongeneric("chi12 = 0 at a = 2b")
        return PUClassification(PUKind.D12, "", inv, abs(a - 2 * b) / cub)
    # D12, pattern c^2 = 4b(a - 2b)
    border = (c / (2 * b)) ** 2 + 2
    if abs(quad) <= tol * cub**2:
        if abs(inv["chi12star"]) <= tol * max(1.0, j.scale() ** 7):
            return nongeneric("chi12star = 0 at a/b = (c/2b)^2 + 2")
        return PUClassification(PUKind.D12, "", inv, abs(quad) / cub**2)
    margin = min(abs(ratio - 1), abs(ratio - border), abs(ratio - 2)) / max(1.0, abs(ratio))
    if ratio > border:
        return PUClassification(PUKind.D1, "", inv, margin)
    if ratio > 1:
        return PUClassification(PUKind.D2, "", inv, margin)
    return PUClassification(PUKind.D3, "", inv, margin)


# ------------------------------------------------------------------ local jet fitting

def _monomial_exponents(max_degree: int):
    return [(i, j, l) for n in range(max_degree + 1)
            for i in range(n, -1, -1) for j in range(n - i, -1, -1) for l in [n - i - j]]


def fit_local_jet(imm, u, step: float = 2e-3, fit_degree: int = 5, adapt: bool = True):
    """Monge jet of the immersion at ``u`` in a principal frame.

    The immersion is sampled on a symmetric 7x7x7 stencil along the
    principal directions (seven nodes per axis keep the pure fifth powers
    distinguishable from lower ones); the normal height over the tangent space is fitted
    by least squares with all monomials up to ``fit_degree`` (the terms above
    order four absorb truncation error) and the derivatives up to order four
    are read off.  The returned jet is rotated so that d = 0 when ``adapt``.
    Returns ``(jet, residual)`` where ``residual`` measures how far the
    fitted quadratic part is from diag(k, k, k3).
    """
    from math import factorial

    from .fundamental_forms import compute_forms
    from .principal_structure import principal_solve

    imm = as_immersion(imm)
    u = np.asarray(u, dtype=float)
    fs = compute_forms(imm, u)
    pdat = principal_solve(fs)
    if imm.simple == "upper":
        frame = [pdat.e1, pdat.e2, pdat.e3]
    else:
        frame = [pdat.e2, pdat.e3, pdat.e1]
    E = np.stack(frame, axis=1)  # u-space directions, g-orthonormal
    p0, D1, _ = imm.derivatives(u)
    p0, D1 = np.real(p0), np.real(D1)
    T = D1 @ E
    Nv = np.real(fs.N)
    offs = np.arange(-3, 4)
    grid = np.array([(i, j, l) for i in offs for j in offs for l in offs], dtype=float)
    X, Z = [], []
    for g in grid:
        q = np.real(imm.point(u + step * (E @ g))) - p0
        X.append(np.linalg.lstsq(T, q - Nv * (Nv @ q), rcond=None)[0] / step)
        Z.append(Nv @ q)
    X, Z = np.array(X), np.array(Z)
    exps = _monomial_exponents(fit_degree)
    M = np.stack([np.prod(X ** np.array(e), axis=1) for e in exps], axis=1)
    coef = np.linalg.lstsq(M, Z, rcond=None)[0]
    deriv = {}
    for e, c in zip(exps, coef):
        n = sum(e)
        if 2 <= n <= 4:
            deriv[e] = c * factorial(e[0]) * factorial(e[1]) * factorial(e[2]) / step**n
    from .jet_model import EXPONENTS
    k = 0.5 * (deriv[(2, 0, 0)] + deriv[(0, 2, 0)])
    vals = {"k": k, "k3": deriv[(0, 0, 2)]}
    for name, idx in EXPONENTS.items():
        vals[name] = deriv[idx]
    off = max(abs(deriv[(1, 1, 0)]), abs(deriv[(1, 0, 1)]), abs(deriv[(0, 1, 1)]),
              abs(deriv[(2, 0, 0)] - deriv[(0, 2, 0)]))
    jet = MongeJet(**vals)
    if adapt:
        jet, _ = adapt_rotation(jet)
    return jet, off


# ------------------------------------------------------------------ continuation

@dataclass(frozen=True)
class ContinuationParams:
    step: float = 5e-3
    n_steps: int = 10
    tol: float = 1e-12
    max_iter: int = 12
    min_step: float = 1e-7
    reclassify: bool = True
    reclass_tol: float = 1e-4
    fit_step: float = 2e-3
    rank_tol: float = 1e-8
    seed_radius: float = 0.1  # the corrected seed may move at most this far


@dataclass(frozen=True)
class CurvePoint:
    u: np.ndarray
    arc: float
    tangent: np.ndarray
    classification: PUClassification | None
    gap23: float
    jet: MongeJet | None = None


def _lm_jacobian(imm, x):
    from .restricted_forms import restricted_with_gradient
    try:
        v, dv = restricted_with_gradient(imm, x)
    except DegeneratePlane as exc:
        raise JacobianRankDrop(f"plane field undefined at {x}: {exc}") from exc
    return np.real(v[:2]), np.real(dv[:2])


def _rank_check(J, tol, x):
    s = np.linalg.svd(J, compute_uv=False)
    if s[0] == 0 or s[1] <= tol * max(1.0, s[0]):
        raise JacobianRankDrop(f"d(Lr, Mr) has rank < 2 at {x}: singular values {s}")


def _tangent(J):
    t = np.cross(J[0], J[1])
    return t / np.linalg.norm(t)


def _correct_seed(imm, x, params):
    x0 = np.asarray(x, dtype=float)
    x = x0.copy()
    for _ in range(4 * params.max_iter):
        F, J = _lm_jacobian(imm, x)
        _rank_check(J, params.rank_tol, x)
        dx = -np.linalg.pinv(J) @ F
        x += dx
        if np.linalg.norm(x - x0) > params.seed_radius:
            raise NewtonDiverged(f"seed {x0} is farther than {params.seed_radius:g} from the curve")
        if np.linalg.norm(dx) <= params.tol * max(1.0, np.linalg.norm(x)):
            return x
    raise NewtonDiverged(f"seed correction did not converge from {x0}")


def _corrector(imm, pred, t, params, h):
    x = pred.copy()
    for _ in range(params.max_iter):
        F, J = _lm_jacobian(imm, x)
        A = np.vstack([J, t])
        rhs = -np.append(F, t @ (x - pred))
        try:
            dx = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError:
            return None
        x += dx
        if np.linalg.norm(x - pred) > 0.5 * h + 1e-12:
            return None
        if np.linalg.norm(dx) <= params.tol * max(1.0, np.linalg.norm(x)):
            F, J = _lm_jacobian(imm, x)
            return x, J
    return None


def _describe(imm, x, J, arc, params):
    from .fundamental_forms import compute_forms
    from .principal_structure import principal_solve

    fs = compute_forms(imm, x)
    pdat = principal_solve(fs)
    gap = pdat.gap23 if imm.simple == "upper" else pdat.gap12
    cls, jet = None, None
    if params.reclassify:
        jet, _ = fit_local_jet(imm, x, params.fit_step)
        cls = classify_point(jet, tol=params.reclass_tol)
    return CurvePoint(u=x.copy(), arc=arc, tangent=_tangent(J), classification=cls, gap23=gap, jet=jet)


def continue_pu_curve(imm, seed=(0.0, 0.0, 0.0), params: ContinuationParams | None = None,
                      direction=None, both: bool = True) -> list[CurvePoint]:
    """Pseudo-arclength continuation of the curve Lr = Mr = 0 through ``seed``.

    Points are returned ordered by signed arclength; with ``both`` the curve
    is followed in the two directions from the corrected seed.
    ``direction`` (a 3-vector) fixes the orientation of positive arclength.
    """
    params = params or ContinuationParams()
    imm = as_immersion(imm)
    x0 = _correct_seed(imm, seed, params)
    _, J0 = _lm_jacobian(imm, x0)
    _rank_check(J0, params.rank_tol, x0)
    t0 = _tangent(J0)
    if direction is not None:
        if t0 @ np.asarray(direction, dtype=float) < 0:
            t0 = -t0
    elif t0[np.argmax(np.abs(t0))] < 0:
        t0 = -t0
    out = [_describe(imm, x0, J0, 0.0, params)]
    for sgn in ((1.0, -1.0) if both else (1.0,)):
        x, t, arc, h = x0.copy(), sgn * t0, 0.0, params.step
        pts = []
        while len(pts) < params.n_steps:
            res = _corrector(imm, x + h * t, t, params, h)
            if res is None:
                h *= 0.5
                if h < params.min_step:
                    raise NewtonDiverged(f"continuation step underflow near {x}")
                continue
            xn, J = res
            _rank_check(J, params.rank_tol, xn)
            tn = _tangent(J)
            if tn @ t < 0:
                tn = -tn
            arc += sgn * np.linalg.norm(xn - x)
            x, t = xn, tn
            pts.append(_describe(imm, x, J, arc, params))
            h = min(params.step, 1.5 * h)
        out.extend(pts)
    out.sort(key=lambda p: p.arc)
    return out


def _kind_between(a: PUKind, b: PUKind) -> PUKind | None:
    pair = {a, b}
    if pair == {PUKind.D1, PUKind.D2}:
        return PUKind.D12
    if pair == {PUKind.D2, PUKind.D3}:
        return PUKind.D23
    return None


def _point_at_arc(imm, p: CurvePoint, s: float, params) -> CurvePoint:
    """Curve point at signed arclength offset ``s`` from ``p`` (single corrector)."""
    h = abs(s)
    t = np.sign(s) * p.tangent
    res = _corrector(imm, p.u + h * t, t, params, max(h, 1e-12) * 4)
    if res is None:
        raise NewtonDiverged("refinement corrector failed")
    x, J = res
    return _describe(imm, x, J, p.arc + s, params)


def arc_pattern(imm, points: list[CurvePoint], params: ContinuationParams | None = None,
                refine: int = 20) -> str:
    """Sequence of point types along a continued curve, e.g. "D1|D12|D2".

    Where two neighbours differ the change is bracketed by bisection along
    the curve.  The transition type is inserted when a bisection point
    classifies as one, or when the bracket collapses between D1 and D2
    (D2 and D3), whose only generic meeting point is D12 (D23).
    """
    params = params or ContinuationParams()
    imm = as_immersion(imm)
    labels: list[str] = []

    def push(lbl):
        if not labels or labels[-1] != lbl:
            labels.append(lbl)

    for p, q in zip(points[:-1], points[1:]):
        push(str(p.classification))
        if p.classification.kind != q.classification.kind:
            lo, hi = p, q
            for _ in range(refine):
                mid = _point_at_arc(imm, lo, 0.5 * (hi.arc - lo.arc), params)
                if mid.classification.kind in (PUKind.D12, PUKind.D23):
                    push(str(mid.classification))
                    break
                if mid.classification.kind == lo.classification.kind:
                    lo = mid
                else:
                    hi = mid
            else:
                # bracketed to 2^-refine of the step without landing on it
                between = _kind_between(lo.classification.kind, hi.classification.kind)
                if between is not None:
                    push(between.value)
    push(str(points[-1].classification))
    return "|".join(labels)


# ------------------------------------------------------------------ contact with the plane field

@dataclass(frozen=True)
class ContactReport:
    arc: float
    value: float  # omega(S') / (|omega| |S'|)
    label: str  # "transversal" | "simple zero" | "degenerate"


def plane_omega(imm):
    """Callable u -> omega, the 1-form whose kernel is the plane field."""
    from .fundamental_forms import compute_forms
    from .principal_structure import plane_field, simple_curvature

    imm = as_immersion(imm)

    def omega(u):
        fs = compute_forms(imm, u)
        return np.real(plane_field(fs, simple_curvature(fs, imm.simple)).omega)
    return omega


def curve_plane_contact(samples, omega, zero_tol: float = 1e-6) -> list[ContactReport]:
    """Contact order of a curve with the plane field ker(omega).

    ``samples`` are CurvePoints (or (arc, u, tangent) triples) ordered by arc.
    A sign change of omega(S') between neighbours is reported as a simple zero
    at the neighbour closest to it; values below ``zero_tol`` that do not
    change sign are degenerate.
    """
    rows = []
    for s in samples:
        if isinstance(s, CurvePoint):
            arc, u, t = s.arc, s.u, s.tangent
        else:
            arc, u, t = s
        w = np.asarray(omega(np.asarray(u, dtype=float)))
        t = np.asarray(t, dtype=float)
        rows.append((arc, float(w @ t / (np.linalg.norm(w) * np.linalg.norm(t)))))
    arcs = np.array([r[0] for r in rows])
    vals = np.array([r[1] for r in rows])
    labels = ["transversal" if abs(v) > zero_tol else "degenerate" for v in vals]
    for i in range(len(vals) - 1):
        if vals[i] * vals[i + 1] < 0 or (vals[i] == 0 and 0 < i and vals[i - 1] * vals[i + 1] < 0):
            j = i if abs(vals[i]) <= abs(vals[i + 1]) else i + 1
            labels[j] = "simple zero"
    for i in range(1, len(vals) - 1):
        if labels[i] == "degenerate" and vals[i - 1] * vals[i + 1] < 0:
            labels[i] = "simple zero"
    return [ContactReport(a, v, l) for a, v, l in zip(arcs, vals, labels)]


# ------------------------------------------------------------------ printed curve coefficients

def curve_coefficients_d12_oracle(j: MongeJet) -> tuple[float, float]:
    """(c1'(0), c2'(0)) of the curve u1 = c1(u3), u2 = c2(u3)."""
    return ((j.b * j.q021 - j.q201 * j.b - j.q111 * j.c) / j.b**2, -j.q111 / j.b)


def curve_coefficients_d23_oracle(j: MongeJet, variant: str = "printed") -> tuple[float, float]:
    """Coefficients of u1^2 in u2 = c2(u1), u3 = c3(u1) at a = b points.

    "printed" evaluates the closed forms as typeset (denominator of c3 with
    the literal "42 b").  "derived" is the solution of Lr = Mr = 0 at second
    order obtained from the restricted-form series; it differs from the
    printed one in the signs of the B, C and q-fraction terms of c2, the
    sign of the q201^2 term of c3 and the denominator 2(b q021 - b q201 - c q111).
    """
    A, B, C = j.A, j.B, j.C
    b, c, dk, k = j.b, j.c, j.k - j.k3, j.k
    q021, q111, q201 = j.q021, j.q111, j.q201
    if variant == "printed":
        c2 = -(q111 * A + q111 * C - (q021 - q201) * B
               - 2 * (q201 * q021 - q111**2) * q111 / dk - 2 * q111 * k**3) / (2 * ((q021 - q201) * b - c * q111))
        c3 = (b * A - b * C + c * B - 2 * k**3 * b
              + (-2 * (q111**2 + q201**2) * b + 2 * q201 * q111 * c) / dk) / (-2 * q201 * b - 2 * c * q111 + 42 * b)
        return c2, c3
    if variant != "derived":
        raise ValueError(f"unknown variant {variant!r}")
    den = 2 * (b * q021 - b * q201 - c * q111)
    c2 = -(q111 * (A - C) + B * (q021 - q201) - 2 * k**3 * q111
           + 2 * q111 * (q021 * q201 - q111**2) / dk) / den
    c3 = (b * (A - C) + c * B - 2 * b * k**3
          + 2 * (b * q201**2 - b * q111**2 + c * q111 * q201) / dk) / den
    return c2, c3
