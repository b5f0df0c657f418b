"""Lie-Cartan lift of the principal line fields over the partially umbilic curve.

In (u, P) space, with ``P = du2/du1``, the principal directions inside the
plane field P3 form the hypersurface ``L(u, P) = Lr P^2 + Mr P + Nr = 0``.
The vector field

    X = (L_P, P L_P, (U + V P) L_P, -(L_u1 + P L_u2 + (U + V P) L_u3))

is tangent to it and projects onto principal directions.  Over the curve
where Lr = Mr = 0, X vanishes exactly where the cubic
``C(P) = A3 P^3 + A2 P^2 + A1 P + A0`` (the fourth component) does, which
gives the curves of singularities whose linearizations are studied below.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal, NamedTuple

import numpy as np
import scipy.optimize

from .classifier import PUKind, classify_point
from .derivatives import jacobian_fd
from .errors import BranchCountMismatch, NewtonDiverged, SpectralTolerance
from .jet_model import Immersion, MongeImmersion, MongeJet, as_immersion
from .restricted_forms import restricted_coefficients, restricted_with_gradient

__all__ = [
    "LCState",
    "SingularBranch",
    "Spectrum",
    "lc_value",
    "lc_gradient",
    "lc_field",
    "lc_field_oracle",
    "cubic_coefficients",
    "cubic_coefficients_oracle",
    "solve_cubic",
    "cubic_discriminant",
    "solve_pu_point",
    "find_singular_branches",
    "branch_spectrum",
    "limit_spectrum",
    "spectrum_at",
    "branch_discriminant",
    "normalize_discriminant",
]

CHART_SWITCH = 10.0


@dataclass(frozen=True)
class LCState:
    u: np.ndarray
    P: float
    chart: Literal["P", "Q"] = "P"

    def __post_init__(self):
        object.__setattr__(self, "u", np.asarray(self.u, dtype=float))

    @property
    def slope(self) -> float:
        """Projective coordinate in the chart (P, or Q = 1/P)."""
        return self.P

    def vector(self) -> np.ndarray:
        return np.append(self.u, self.P)

    @classmethod
    def from_vector(cls, x, chart="P") -> "LCState":
        return cls(np.asarray(x[:3]), float(x[3]), chart)

    def switched(self) -> "LCState":
        """Same point in the other chart."""
        return LCState(self.u, 1.0 / self.P, "Q" if self.chart == "P" else "P")

    def hygienic(self) -> "LCState":
        """Switch charts when the slope leaves [-10, 10]."""
        return self.switched() if abs(self.P) > CHART_SWITCH else self

    def direction(self, plane=None) -> np.ndarray:
        """The (du1, du2) direction the state represents."""
        return np.array([1.0, self.P]) if self.chart == "P" else np.array([self.P, 1.0])


def _poly_parts(v, dv, s, chart):
    """L and its partials in the given chart from restricted coefficients."""
    Lr, Mr, Nr, U, V = v
    if chart == "P":
        L = Lr * s**2 + Mr * s + Nr
        Ls = 2 * Lr * s + Mr
        Lu = dv[0] * s**2 + dv[1] * s + dv[2]
    else:
        L = Lr + Mr * s + Nr * s**2
        Ls = Mr + 2 * Nr * s
        Lu = dv[0] + dv[1] * s + dv[2] * s**2
    return L, Ls, Lu, U, V


def lc_value(imm, state: LCState) -> float:
    Lr, Mr, Nr, _, _ = restricted_coefficients(as_immersion(imm), state.u)
    s = state.P
    if state.chart == "P":
        return float(np.real(Lr * s**2 + Mr * s + Nr))
    return float(np.real(Lr + Mr * s + Nr * s**2))


def lc_gradient(imm, state: LCState) -> np.ndarray:
    """Gradient of L with respect to (u1, u2, u3, slope)."""
    v, dv = restricted_with_gradient(imm, state.u)
    _, Ls, Lu, _, _ = _poly_parts(v, dv, state.P, state.chart)
    return np.append(Lu, Ls)


def lc_field(imm, state: LCState) -> np.ndarray:
    """The Lie-Cartan field (X1, X2, X3, X4) in the state's chart."""
    v, dv = restricted_with_gradient(as_immersion(imm), state.u)
    _, Ls, Lu, U, V = _poly_parts(v, dv, state.P, state.chart)
    s = state.P
    if state.chart == "P":
        w = U + V * s
        return np.array([Ls, s * Ls, w * Ls, -(Lu[0] + s * Lu[1] + w * Lu[2])])
    w = U * s + V
    return np.array([s * Ls, Ls, w * Ls, -(s * Lu[0] + Lu[1] + w * Lu[2])])


def _field_vector(imm, chart):
    return lambda x: lc_field(imm, LCState(x[:3], x[3], chart))


# ------------------------------------------------------------------ printed truncations

def cubic_coefficients_oracle(jet: MongeJet, u):
    """Linear truncations of (A3, A2, A1, A0) about the origin."""
    j = jet
    k, k3 = j.k, j.k3
    a, b, c = j.a, j.b, j.c
    q012, q021, q102, q111, q201 = j.q012, j.q021, j.q102, j.q111, j.q201
    A, B, C, D, E = j.A, j.B, j.C, j.D, j.E
    u1, u2, u3 = u
    dk = k - k3
    A3 = (b + (C - k**3 + (q111**2 + q201 * q021) / dk) * u1 + (D + 3 * q111 * q021 / dk) * u2
          + (j.Q121 + (2 * q111 * q012 + q102 * q021) / dk) * u3)
    # the u3 coefficient is printed with Q211 multiplying the q-bracket; kept as written
    A2 = (-c + (-D + 2 * B + (6 * q111 * q201 - 3 * q111 * q021) / dk) * u1
          + (-E + k**3 + 2 * C + (4 * q111**2 - 3 * q021**2 + 2 * q201 * q021) / dk) * u2
          + (-j.Q031 + 2 * j.Q211 * (2 * q201 * q012 + 4 * q102 * q111 - 3 * q012 * q021) / dk) * u3)
    A1 = (a - 2 * b + (-2 * C + A - k**3 + (-2 * q201 * q021 - 4 * q111**2 + 3 * q201**2) / dk) * u1
          + (-2 * D + B + (3 * q111 * q201 - 6 * q111 * q021) / dk) * u2
          + (-2 * j.Q121 + j.Q301 + (3 * q102 * q201 - 2 * q102 * q021 - 4 * q111 * q012) / dk) * u3)
    A0 = ((-B - 3 * q111 * q201 / dk) * u1 + (-C + k**3 - (2 * q111**2 + q201 * q021) / dk) * u2
          + (-j.Q211 - (q201 * q012 + 2 * q102 * q111) / dk) * u3)
    return np.array([A3, A2, A1, A0])


def lc_field_oracle(jet: MongeJet, state: LCState) -> np.ndarray:
    """Printed low-order truncation of X in the P chart."""
    j = jet
    u1, u2, u3 = state.u
    P = state.P
    dk = j.k - j.k3
    X1 = ((-2 * j.b * u2 - 2 * j.q111 * u3) * P + (-j.a + j.b) * u1 + j.c * u2
          + (-j.q201 + j.q021) * u3)
    w = (-(j.q111 * u1 + j.q021 * u2 + j.q012 * u3) / dk * P
         - (j.q201 * u1 + j.q111 * u2 + j.q102 * u3) / dk)
    A3, A2, A1, A0 = cubic_coefficients_oracle(jet, state.u)
    return np.array([X1, P * X1, w * X1, A3 * P**3 + A2 * P**2 + A1 * P + A0])


# ------------------------------------------------------------------ cubic utilities

def cubic_coefficients(imm, u) -> np.ndarray:
    """(A3, A2, A1, A0) of the fourth field component X4 as a cubic in P.

    On the curve Lr = Mr = 0, X1..X3 vanish for every P, so the singular
    points of X over a curve point are the real roots of this cubic.
    """
    v, dv = restricted_with_gradient(as_immersion(imm), u)
    U, V = v[3], v[4]
    dL, dM, dN = dv[0], dv[1], dv[2]
    A3 = -(dL[1] + V * dL[2])
    A2 = -(dL[0] + dM[1] + U * dL[2] + V * dM[2])
    A1 = -(dM[0] + dN[1] + U * dM[2] + V * dN[2])
    A0 = -(dN[0] + U * dN[2])
    return np.real(np.array([A3, A2, A1, A0]))


def cubic_discriminant(coeffs) -> float:
    a3, a2, a1, a0 = coeffs
    return (18 * a3 * a2 * a1 * a0 - 4 * a2**3 * a0 + a2**2 * a1**2
            - 4 * a3 * a1**3 - 27 * a3**2 * a0**2)


def solve_cubic(coeffs, rel_tol: float = 1e-12, polish: int = 2) -> np.ndarray:
    """Real roots of a3 P^3 + a2 P^2 + a1 P + a0 (ascending), Cardano plus Newton polish.

    Double roots closer than the discriminant tolerance are merged into one.
    """
    a3, a2, a1, a0 = (float(x) for x in coeffs)
    scale = max(abs(a3), abs(a2), abs(a1), abs(a0))
    if scale == 0:
        raise ValueError("all cubic coefficients vanish")
    if abs(a3) <= 1e-14 * scale:
        if abs(a2) <= 1e-14 * scale:
            return np.array([-a0 / a1]) if a1 != 0 else np.array([])
        d = a1 * a1 - 4 * a2 * a0
        if d < 0:
            return np.array([])
        q = -0.5 * (a1 + np.copysign(np.sqrt(d), a1))
        return np.sort(np.array([q / a2, a0 / q]) if q != 0 else np.array([0.0]))
    b, c, d = a2 / a3, a1 / a3, a0 / a3
    p = c - b * b / 3
    q = 2 * b**3 / 27 - b * c / 3 + d
    disc = cubic_discriminant((a3, a2, a1, a0))
    shift = -b / 3
    if abs(disc) <= rel_tol * scale**4:
        # multiple root
        if abs(p) <= 1e-14 * max(1.0, b * b):
            roots = [shift]
        else:
            roots = [shift + 3 * q / p, shift - 1.5 * q / p]
    elif disc > 0:
        m = 2 * np.sqrt(-p / 3)
        theta = np.arccos(np.clip(3 * q / (p * m), -1.0, 1.0)) / 3
        roots = [shift + m * np.cos(theta - 2 * np.pi * i / 3) for i in range(3)]
    else:
        s = np.sqrt(q * q / 4 + p**3 / 27)
        roots = [shift + np.cbrt(-q / 2 + s) + np.cbrt(-q / 2 - s)]
    out = []
    for r in roots:
        for _ in range(polish):
            f = ((a3 * r + a2) * r + a1) * r + a0
            df = (3 * a3 * r + 2 * a2) * r + a1
            if df == 0:
                break
            r = r - f / df
        out.append(r)
    return np.sort(np.array(out))


# ------------------------------------------------------------------ the partially umbilic curve

def solve_pu_point(imm, fixed: int, value: float, guess, tol: float = 1e-13,
                   max_iter: int = 40, max_jump: float = 0.5) -> np.ndarray:
    """Point of Lr = Mr = 0 with coordinate ``fixed`` set to ``value`` (Newton)."""
    imm = as_immersion(imm)
    free = [i for i in range(3) if i != fixed]
    x = np.asarray(guess, dtype=float).copy()
    x[fixed] = value
    start = x.copy()
    for _ in range(max_iter):
        v, dv = restricted_with_gradient(imm, x)
        F = np.real(v[:2])
        J = np.real(dv[:2][:, free])
        try:
            dx = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError as exc:
            raise NewtonDiverged("singular Jacobian of (Lr, Mr)") from exc
        x[free] += dx
        if np.linalg.norm(x - start) > max_jump:
            raise NewtonDiverged(f"Newton left the trust region at {fixed=} {value=}")
        if np.linalg.norm(dx) <= tol * max(1.0, np.linalg.norm(x)):
            return x
    raise NewtonDiverged(f"no convergence on the partially umbilic curve at {fixed=} {value=}")


class Spectrum(NamedTuple):
    lam3: float
    lam4: float
    nh_type: str
    zero_residual: float  # size of the two structural eigenvalues relative to |DX|


@dataclass
class SingularBranch:
    label: str
    root_at_origin: float
    parameter: str  # "u3", "u1" or "P"
    samples: list = field(default_factory=list)  # (arc parameter, LCState)
    eig: list = field(default_factory=list)  # (lam3, lam4) per sample
    nh_type: str = "undetermined"
    _locate: Callable | None = field(default=None, repr=False)
    imm: Immersion | None = field(default=None, repr=False)

    def state_at(self, s: float) -> LCState:
        """Re-solve the branch at arc parameter ``s``."""
        return self._locate(s)

    @property
    def params(self) -> np.ndarray:
        return np.array([s for s, _ in self.samples])


def spectrum_at(imm, state: LCState, step: float = 1e-5, zero_tol: float = 1e-6) -> Spectrum:
    """Nonzero eigenvalue pair of DX at a singular point of X."""
    imm = as_immersion(imm)
    st = state.hygienic()
    J = jacobian_fd(_field_vector(imm, st.chart), st.vector(), step)
    norm = np.linalg.norm(J, 2)
    if norm == 0:
        raise SpectralTolerance("DX vanishes")
    Uu, S, Vt = np.linalg.svd(J)
    red = np.diag(S[:2]) @ Vt[:2] @ Uu[:, :2]
    pair = np.linalg.eigvals(red)
    full = np.linalg.eigvals(J)
    # the two full eigenvalues not matched to the pair are the structural zeros
    rest = list(full)
    for lam in pair:
        rest.pop(int(np.argmin(np.abs(np.array(rest) - lam))))
    zres = max(abs(z) for z in rest) / norm
    if zres > zero_tol:
        raise SpectralTolerance(f"structural zero eigenvalues not separated ({zres:.2e} |DX|)")
    if np.max(np.abs(pair.imag)) > 1e-6 * norm:
        return Spectrum(float(pair[0].real), float(pair[1].real), "undetermined", zres)
    l3, l4 = sorted(pair.real, key=lambda z: -z)
    return Spectrum(float(l3), float(l4), _nh_type(l3, l4, norm), zres)


def _nh_type(l3, l4, norm, tol=1e-7):
    if min(abs(l3), abs(l4)) <= tol * norm:
        return "undetermined"
    if l3 * l4 < 0:
        return "saddle"
    return "attractor" if l3 < 0 else "repeller"


def branch_spectrum(branch: SingularBranch, at: float, zero_tol: float = 1e-6) -> Spectrum:
    return spectrum_at(branch.imm, branch.state_at(at), zero_tol=zero_tol)


def limit_spectrum(branch: SingularBranch, eps: float = 1e-4) -> Spectrum:
    """Eigenvalue pair as the arc parameter tends to 0: mean of the values at +-eps."""
    sp = [branch_spectrum(branch, s) for s in (eps, -eps)]
    pairs = [sorted((x.lam3, x.lam4)) for x in sp]
    hi = 0.5 * (pairs[0][1] + pairs[1][1])
    lo = 0.5 * (pairs[0][0] + pairs[1][0])
    types = {x.nh_type for x in sp}
    kind = types.pop() if len(types) == 1 else "saddle-node"
    return Spectrum(hi, lo, kind, max(x.zero_residual for x in sp))


def _classification_kind(imm, kind):
    if kind is not None:
        return PUKind(kind) if not isinstance(kind, PUKind) else kind
    if isinstance(imm, MongeImmersion):
        return classify_point(imm.jet).kind
    if isinstance(imm, MongeJet):
        return classify_point(imm).kind
    raise ValueError("pass kind= for immersions that are not Monge jets")


EXPECTED_BRANCHES = {PUKind.D1: 1, PUKind.D2: 3, PUKind.D3: 3, PUKind.D12: 2, PUKind.D23: 3}


def find_singular_branches(jet, arc_range: float = 0.02, n: int = 9, kind=None,
                           root_tol: float = 1e-6) -> list[SingularBranch]:
    """Curves of singularities of X over the origin's partially umbilic curve.

    The curve is parametrized by u3 (u1 at D23 points); at D12 points the
    branch through the double root of C(0, P) is parametrized by P instead.
    """
    kind = _classification_kind(jet, kind)
    imm = as_immersion(jet)
    if kind not in EXPECTED_BRANCHES:
        raise BranchCountMismatch(f"no singular branches are defined for {kind.value}")
    fixed = 0 if kind is PUKind.D23 else 2
    pname = "u1" if fixed == 0 else "u3"
    cache: dict[float, np.ndarray] = {0.0: np.zeros(3)}

    def curve_point(t):
        t = float(t)
        if t in cache:
            return cache[t]
        near = min(cache, key=lambda s: abs(s - t))
        u = solve_pu_point(imm, fixed, t, cache[near])
        cache[t] = u
        return u

    def cubic_at(t):
        return cubic_coefficients(imm, curve_point(t))

    roots0 = solve_cubic(cubic_at(0.0), rel_tol=root_tol)
    expected = EXPECTED_BRANCHES[kind]
    if len(roots0) != (2 if kind is PUKind.D12 else expected):
        raise BranchCountMismatch(f"{kind.value}: C(0, P) has {len(roots0)} distinct real roots "
                                  f"{np.round(roots0, 8).tolist()}, expected {expected}")
    if kind is not PUKind.D12:
        for t in (-arc_range / n, arc_range / n):
            rt = solve_cubic(cubic_at(t), rel_tol=root_tol * 1e-3)
            if len(rt) != expected:
                raise BranchCountMismatch(f"{kind.value}: {len(rt)} roots at {pname}={t:g}")

    branches = []
    ts = np.linspace(-arc_range, arc_range, 2 * n + 1)
    names = "zeta" if kind is PUKind.D12 else "gamma"

    if kind is PUKind.D12:
        A = cubic_at(0.0)
        double = roots0[np.argmin(np.abs(np.polyval(np.polyder(A), roots0)))]
        simple_roots = [r for r in roots0 if r != double]
    else:
        double = None
        simple_roots = list(roots0)
    # order: the root 0 first, then ascending
    simple_roots.sort(key=lambda r: (abs(r) > 1e-9, r))

    for idx, r0 in enumerate(simple_roots, start=1):
        def locate(t, r0=r0):
            A = cubic_at(t)
            P = r0
            # continue the root from the origin in a few steps for robustness
            for frac in (0.5, 1.0) if abs(t) > 0 else (1.0,):
                Ai = cubic_at(t * frac)
                try:
                    P = scipy.optimize.newton(lambda p: np.polyval(Ai, p), P,
                                              fprime=lambda p: np.polyval(np.polyder(Ai), p), tol=1e-14)
                except RuntimeError as exc:
                    raise NewtonDiverged(f"root continuation from P={r0:.6g} failed at t={t:g}: {exc}") from None
            u = curve_point(t)
            return LCState(u, P).hygienic()
        br = SingularBranch(label=f"{names}{idx}", root_at_origin=float(r0), parameter=pname,
                            _locate=locate, imm=imm)
        branches.append(br)

    if double is not None:
        # fold branch: for each slope P find the curve parameter where C vanishes
        def locate_fold(P, P0=double):
            Pv = P0 + P
            g = lambda t: np.polyval(cubic_at(t), Pv)
            t0 = 0.0
            try:
                t = scipy.optimize.newton(g, t0, x1=1e-7, tol=1e-15, maxiter=60)
            except RuntimeError as exc:
                raise NewtonDiverged(f"fold branch not found at P={Pv:.6g}: {exc}") from None
            return LCState(curve_point(t), Pv)
        branches.append(SingularBranch(label=f"{names}{len(branches) + 1}", root_at_origin=float(double),
                                       parameter="P", _locate=locate_fold, imm=imm))

    for br in branches:
        grid = ts if br.parameter != "P" else np.linspace(-0.2, 0.2, 2 * n + 1)
        for t in grid:
            st = br.state_at(t)
            br.samples.append((float(t), st))
            try:
                sp = spectrum_at(imm, st)
                br.eig.append((sp.lam3, sp.lam4))
            except SpectralTolerance:
                br.eig.append((np.nan, np.nan))
        br.nh_type = _branch_type(br)
    return branches


def _branch_type(br: SingularBranch) -> str:
    eig = np.array([e for e in br.eig if np.all(np.isfinite(e))])
    if eig.size == 0:
        return "undetermined"
    prod = eig[:, 0] * eig[:, 1]
    small = np.min(np.abs(eig), axis=1)
    scale = np.max(np.abs(eig))
    if np.all(prod < 0) and np.all(small > 1e-6 * scale):
        return "saddle"
    if np.all(prod > 0):
        return "attractor" if np.all(eig < 0) else ("repeller" if np.all(eig > 0) else "undetermined")
    # an eigenvalue changes sign along the branch
    lo = np.argmin(np.abs(eig), axis=1)
    vals = eig[np.arange(len(eig)), lo]
    if np.any(vals > 0) and np.any(vals < 0):
        return "saddle-node"
    return "undetermined"


# ------------------------------------------------------------------ discriminant along the curve

def normalize_discriminant(raw: float, coeffs, jet: MongeJet | None, normalization: str) -> float:
    """Scale the raw cubic discriminant.

    "raw": 18 a3a2a1a0 - 4 a2^3 a0 + a2^2 a1^2 - 4 a3 a1^3 - 27 a3^2 a0^2.
    "darboux": -raw / A3^4, positive for a single real root.
    "cardano": -raw / (108 A3^4), the value q^2/4 + p^3/27 of the depressed cubic.
    "transition": (k - k3) b^2 raw / (4 A2^3), whose first-order term along the
    curve at an a = 2b point is chi12.
    """
    a3, a2 = coeffs[0], coeffs[1]
    if normalization == "raw":
        return raw
    if normalization == "darboux":
        return -raw / a3**4
    if normalization == "cardano":
        return -raw / (108 * a3**4)
    if normalization == "transition":
        if jet is None:
            raise ValueError("the transition normalization needs the jet")
        return (jet.k - jet.k3) * jet.b**2 * raw / (4 * a2**3)
    raise ValueError(f"unknown normalization {normalization!r}")


def branch_discriminant(jet, params, normalization: str = "darboux", kind=None) -> np.ndarray:
    """Discriminant of C(t, P) at the curve points with parameter t."""
    kind = _classification_kind(jet, kind)
    imm = as_immersion(jet)
    mj = jet if isinstance(jet, MongeJet) else getattr(imm, "jet", None)
    fixed = 0 if kind is PUKind.D23 else 2
    order = np.argsort(np.abs(np.asarray(params, dtype=float)))
    vals = np.empty(len(order))
    pts = {0.0: np.zeros(3)}
    for i in order:
        t = float(np.asarray(params, dtype=float)[i])
        near = min(pts, key=lambda s: abs(s - t))
        u = np.zeros(3) if t == 0 else solve_pu_point(imm, fixed, t, pts[near])
        pts[t] = u
        A = cubic_coefficients(imm, u)
        vals[i] = normalize_discriminant(cubic_discriminant(A), A, mj, normalization)
    return vals
