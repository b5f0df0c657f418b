"""Monge-chart 4-jets and immersion evaluators.

A hypersurface germ of R^4 is written as the graph
``(u1, u2, u3) -> (u1, u2, u3, h(u))`` where ``h`` starts at order two with
the diagonal quadratic part ``k/2 (u1^2 + u2^2) + k3/2 u3^2``.  Every other
coefficient of the jet is a partial derivative of ``h`` at the origin, e.g.
``q111 = d^3 h / du1 du2 du3`` and ``Q211 = d^4 h / du1^2 du2 du3``.
"""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass, fields
from typing import Callable, Literal

import numpy as np
from scipy.optimize import brentq

from .errors import AllCubicsZero, ZeroCurvature
from .poly import TruncPoly

__all__ = [
    "MongeJet",
    "EXPONENTS",
    "eval_height",
    "adapt_rotation",
    "adapt_scale",
    "Immersion",
    "MongeImmersion",
    "GraphImmersion",
    "ParametricImmersion",
    "as_immersion",
]

# coefficient name -> multi-index of the partial derivative it stores
EXPONENTS: dict[str, tuple[int, int, int]] = {
    "a": (3, 0, 0),
    "b": (1, 2, 0),
    "c": (0, 3, 0),
    "d": (2, 1, 0),
    "q003": (0, 0, 3),
    "q012": (0, 1, 2),
    "q021": (0, 2, 1),
    "q102": (1, 0, 2),
    "q111": (1, 1, 1),
    "q201": (2, 0, 1),
    "A": (4, 0, 0),
    "B": (3, 1, 0),
    "C": (2, 2, 0),
    "D": (1, 3, 0),
    "E": (0, 4, 0),
    "Q004": (0, 0, 4),
    "Q013": (0, 1, 3),
    "Q022": (0, 2, 2),
    "Q031": (0, 3, 1),
    "Q103": (1, 0, 3),
    "Q112": (1, 1, 2),
    "Q121": (1, 2, 1),
    "Q202": (2, 0, 2),
    "Q211": (2, 1, 1),
    "Q301": (3, 0, 1),
}


@dataclass(frozen=True)
class MongeJet:
    k: float = 0.0
    k3: float = 0.0
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0
    q003: float = 0.0
    q012: float = 0.0
    q021: float = 0.0
    q102: float = 0.0
    q111: float = 0.0
    q201: float = 0.0
    A: float = 0.0
    B: float = 0.0
    C: float = 0.0
    D: float = 0.0
    E: float = 0.0
    Q004: float = 0.0
    Q013: float = 0.0
    Q022: float = 0.0
    Q031: float = 0.0
    Q103: float = 0.0
    Q112: float = 0.0
    Q121: float = 0.0
    Q202: float = 0.0
    Q211: float = 0.0
    Q301: float = 0.0

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)

    def replace(self, **changes) -> "MongeJet":
        return dataclasses.replace(self, **changes)

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in self.names()], dtype=float)

    def scale(self) -> float:
        return float(np.max(np.abs(self.as_array())))

    def to_poly(self, order: int = 4) -> TruncPoly:
        derivs = {(2, 0, 0): self.k, (0, 2, 0): self.k, (0, 0, 2): self.k3}
        for name, idx in EXPONENTS.items():
            derivs[idx] = getattr(self, name)
        return TruncPoly.from_derivatives(derivs, order)

    @classmethod
    def from_poly(cls, p: TruncPoly, tol: float = 1e-9) -> "MongeJet":
        """Read a jet off a height polynomial whose quadratic part is diag(k, k, k3)."""
        k11 = p.derivative_at_zero((2, 0, 0))
        k22 = p.derivative_at_zero((0, 2, 0))
        off = [p.derivative_at_zero(i) for i in ((1, 1, 0), (1, 0, 1), (0, 1, 1))]
        low = [p.derivative_at_zero(i) for i in ((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1))]
        ref = tol * (1.0 + abs(k11) + abs(k22))
        if abs(k11 - k22) > ref or max(map(abs, off + low)) > ref:
            raise ValueError("height polynomial is not in adapted Monge form")
        values = {"k": 0.5 * (k11 + k22), "k3": p.derivative_at_zero((0, 0, 2))}
        for name, idx in EXPONENTS.items():
            values[name] = p.derivative_at_zero(idx)
        return cls(**values)


def eval_height(jet: MongeJet, u) -> float:
    """Quartic height function of the jet at ``u`` (works for complex ``u``)."""
    u1, u2, u3 = u
    j = jet
    return (
        j.k / 2 * (u1**2 + u2**2) + j.k3 / 2 * u3**2
        + j.a / 6 * u1**3 + j.d / 2 * u1**2 * u2 + j.b / 2 * u1 * u2**2 + j.c / 6 * u2**3
        + j.q003 / 6 * u3**3 + j.q012 / 2 * u2 * u3**2 + j.q111 * u1 * u2 * u3
        + j.q021 / 2 * u2**2 * u3 + j.q102 / 2 * u1 * u3**2 + j.q201 / 2 * u1**2 * u3
        + j.A / 24 * u1**4 + j.B / 6 * u1**3 * u2 + j.C / 4 * u1**2 * u2**2
        + j.D / 6 * u1 * u2**3 + j.E / 24 * u2**4
        + j.Q004 / 24 * u3**4 + j.Q013 / 6 * u2 * u3**3 + j.Q103 / 6 * u1 * u3**3
        + j.Q022 / 4 * u2**2 * u3**2 + j.Q202 / 4 * u1**2 * u3**2 + j.Q112 / 2 * u1 * u2 * u3**2
        + j.Q031 / 6 * u2**3 * u3 + j.Q301 / 6 * u1**3 * u3 + j.Q121 / 2 * u1 * u2**2 * u3
        + j.Q211 / 2 * u1**2 * u2 * u3
    )


# ---------------------------------------------------------------- rotation

def _cubic_tensor_entry(jet: MongeJet, theta: float, pattern: str) -> float:
    """Third derivative of the (u1,u2) cubic along rotated axes.

    ``pattern`` lists the rotated axes, e.g. "112" is the new u1^2 u2 coefficient.
    """
    T = {
        (0, 0, 0): jet.a, (0, 0, 1): jet.d, (0, 1, 1): jet.b, (1, 1, 1): jet.c,
    }
    cs, sn = np.cos(theta), np.sin(theta)
    axes = {"1": (cs, sn), "2": (-sn, cs)}
    vecs = [axes[ch] for ch in pattern]
    total = 0.0
    for i in (0, 1):
        for j in (0, 1):
            for l in (0, 1):
                key = tuple(sorted((i, j, l)))
                total += T[key] * vecs[0][i] * vecs[1][j] * vecs[2][l]
    return total


def rotate_jet(jet: MongeJet, theta: float) -> MongeJet:
    """Exact re-expansion of the height after ``u = R(theta) u'`` in the (u1,u2)-plane."""
    p = jet.to_poly()
    cs, sn = np.cos(theta), np.sin(theta)
    x1 = TruncPoly.variable(0, 4)
    x2 = TruncPoly.variable(1, 4)
    x3 = TruncPoly.variable(2, 4)
    q = p.compose([x1 * cs - x2 * sn, x1 * sn + x2 * cs, x3])
    return MongeJet.from_poly(q)


def adapt_rotation(raw: MongeJet, grid: int = 720):
    """Rotate in the (u1,u2)-plane so that the u1^2 u2 coefficient vanishes.

    Returns ``(jet, angle)``.  The transformed coefficient is odd under a
    half turn, so its zeros are searched on [-pi/2, pi/2): bracketed on a
    grid and refined with Brent's method to 1e-13.  When several exist, the
    chart with the largest |b| is taken (furthest from the degenerate b = 0
    chart).  An already adapted jet is returned unchanged with angle 0.
    """
    cubic = max(abs(raw.a), abs(raw.b), abs(raw.c), abs(raw.d))
    if cubic == 0.0:
        warnings.warn("a, b, c, d all vanish; rotation left undefined", AllCubicsZero)
        return raw, 0.0
    if abs(raw.d) <= 1e-13 * cubic:
        return raw.replace(d=0.0), 0.0

    def dval(t):
        return _cubic_tensor_entry(raw, t, "112")

    ts = np.linspace(-0.5 * np.pi, 0.5 * np.pi, grid + 1)
    vals = np.array([dval(t) for t in ts])
    roots = []
    for t0, t1, v0, v1 in zip(ts[:-1], ts[1:], vals[:-1], vals[1:]):
        if v0 == 0.0:
            roots.append(t0)
        elif v0 * v1 < 0:
            roots.append(brentq(dval, t0, t1, xtol=1e-13, rtol=4 * np.finfo(float).eps))
    if not roots:  # tangential double zero missed by the grid: use the minimiser
        roots.append(float(ts[np.argmin(np.abs(vals[:-1]))]))
    theta = max(roots, key=lambda t: abs(_cubic_tensor_entry(raw, t, "122")))
    out = rotate_jet(raw, theta)
    return out.replace(d=0.0), float(theta)


# ----------------------------------------------------------------- scaling

def _homothety(jet: MongeJet, lam: float, sign: float) -> MongeJet:
    """Coefficients after ``u -> lam * u`` and ``h -> sign * h / lam``."""
    vals = {"k": sign * jet.k * lam, "k3": sign * jet.k3 * lam}
    for name, (i, j, l) in EXPONENTS.items():
        n = i + j + l
        vals[name] = sign * getattr(jet, name) * lam ** (n - 1)
    return MongeJet(**vals)


def _invert_to_flat_pair(jet: MongeJet) -> MongeJet:
    """Inversion in the sphere through 0 centred at rho*e4 with rho = 2/k.

    The map keeps the origin and its tangent space; it sends the pair of
    curvatures k to 0 and k3 to k3 - k (after reflecting e4 back), and acts
    on the 3- and 4-jets by exact series composition.
    """
    rho = 2.0 / jet.k
    n = 4
    h = jet.to_poly(n)
    X = [TruncPoly.variable(i, n) for i in range(3)]
    r2 = X[0] * X[0] + X[1] * X[1] + X[2] * X[2]

    def s_of(hp, r2p):
        return hp * (2.0 / rho) - (r2p + hp * hp) * (1.0 / rho**2)

    # new tangential coordinates x' = u / (1 - s(u)); invert by fixed point u = x'(1 - s(u))
    u = list(X)
    for _ in range(n + 1):
        hu = h.compose(u)
        ru = u[0] * u[0] + u[1] * u[1] + u[2] * u[2]
        one_minus_s = 1.0 - s_of(hu, ru)
        u = [X[i] * one_minus_s for i in range(3)]
    s = s_of(h, r2)
    geo = 1.0 + s + s * s  # 1/(1-s) to the order needed (s starts at order 2)
    y = (-h + (r2 + h * h) * (1.0 / rho)) * geo
    H = -(y.compose(u))
    out = MongeJet.from_poly(H, tol=1e-7)
    return out.replace(k=0.0)


def adapt_scale(jet: MongeJet, target: Literal["k3_to_1", "k_to_0"] = "k3_to_1") -> MongeJet:
    if target == "k3_to_1":
        if jet.k3 == 0.0:
            raise ZeroCurvature("k3 = 0: no homothety makes it 1")
        if jet.k3 == 1.0:
            return jet
        return _homothety(jet, 1.0 / abs(jet.k3), float(np.sign(jet.k3)))
    if target == "k_to_0":
        if jet.k == 0.0:
            return jet
        out = _invert_to_flat_pair(jet)
        return out
    raise ValueError(f"unknown target {target!r}")


# -------------------------------------------------------------- immersions

class Immersion:
    """Evaluator of an immersion alpha: R^3 -> R^4 and its first two derivatives.

    Subclasses implement ``derivatives(u) -> (alpha, D1, D2)`` with shapes
    (4,), (4, 3) and (4, 3, 3).  ``analytic`` tells whether the evaluation is
    a holomorphic expression that may be called at complex points (which lets
    callers differentiate by the complex-step method).  ``simple`` names the
    position of the simple principal curvature in the sorted spectrum:
    "upper" (k1 = k2 < k3, the S12 picture) or "lower" (k1 < k2 = k3).
    """

    analytic: bool = False
    simple: str = "upper"

    def derivatives(self, u):
        raise NotImplementedError

    def point(self, u) -> np.ndarray:
        return self.derivatives(u)[0]


class MongeImmersion(Immersion):
    """Graph of the quartic height of a :class:`MongeJet`, differentiated exactly."""

    analytic = True

    def __init__(self, jet: MongeJet, simple: str | None = None):
        self.jet = jet
        if simple is None:
            simple = "upper" if jet.k3 >= jet.k else "lower"
        self.simple = simple
        p = jet.to_poly(4)
        mons = [m for m, v in p.monomials()]
        self._exps = np.array(mons)  # (M, 3)
        coef = np.array([p.c[m] for m in mons])
        # derivative coefficient vectors over the same monomial basis
        self._rows = {}
        self._rows[(0, 0, 0)] = coef
        for idx in [(1, 0, 0), (0, 1, 0), (0, 0, 1),
                    (2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]:
            row = np.zeros(len(mons))
            for n, m in enumerate(mons):
                e = np.array(m) + np.array(idx)
                if e.sum() > 4:
                    continue
                fac = 1.0
                for ei, di in zip(e, idx):
                    for t in range(di):
                        fac *= ei - t
                row[n] = p.c[tuple(e)] * fac
            self._rows[idx] = row
        self._mat = np.vstack([self._rows[i] for i in sorted(self._rows)])
        self._order = sorted(self._rows)

    def _monomials(self, u):
        u = np.asarray(u)
        pw = [np.array([u[i] ** n for n in range(5)]) for i in range(3)]
        e = self._exps
        return pw[0][e[:, 0]] * pw[1][e[:, 1]] * pw[2][e[:, 2]]

    def height_derivatives(self, u) -> dict:
        vals = self._mat @ self._monomials(u)
        return dict(zip(self._order, vals))

    def derivatives(self, u):
        u = np.asarray(u)
        hd = self.height_derivatives(u)
        dtype = np.result_type(u, float)
        alpha = np.zeros(4, dtype=dtype)
        alpha[:3] = u
        alpha[3] = hd[(0, 0, 0)]
        D1 = np.zeros((4, 3), dtype=dtype)
        D1[:3, :3] = np.eye(3)
        unit = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
        for i in range(3):
            D1[3, i] = hd[unit[i]]
        D2 = np.zeros((4, 3, 3), dtype=dtype)
        for i in range(3):
            for j in range(3):
                idx = tuple(np.add(unit[i], unit[j]))
                D2[3, i, j] = hd[idx]
        return alpha, D1, D2


class ParametricImmersion(Immersion):
    """General immersion given by a callable, with optional exact derivatives.

    Missing first derivatives are central differences with relative step
    ``step``; missing second derivatives are differences of the first ones
    (step ``step``) when a Jacobian is supplied, else a second-difference
    stencil with step ``10 * step``.
    """

    def __init__(self, alpha: Callable, jac: Callable | None = None,
                 hess: Callable | None = None, step: float = 1e-5,
                 simple: str = "upper", analytic: bool = False):
        self._alpha = alpha
        self._jac = jac
        self._hess = hess
        self.step = step
        self.simple = simple
        self.analytic = analytic and jac is not None and hess is not None

    def _fd_jac(self, u):
        h = self.step * (1.0 + np.max(np.abs(u)))
        cols = []
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            cols.append((np.asarray(self._alpha(u + e)) - np.asarray(self._alpha(u - e))) / (2 * h))
        return np.stack(cols, axis=1)

    def derivatives(self, u):
        u = np.asarray(u, dtype=np.result_type(u, float))
        alpha = np.asarray(self._alpha(u))
        D1 = np.asarray(self._jac(u)) if self._jac is not None else self._fd_jac(u)
        if self._hess is not None:
            D2 = np.asarray(self._hess(u))
        elif self._jac is not None:
            h = self.step * (1.0 + np.max(np.abs(u)))
            D2 = np.zeros((4, 3, 3))
            for j in range(3):
                e = np.zeros(3)
                e[j] = h
                D2[:, :, j] = (np.asarray(self._jac(u + e)) - np.asarray(self._jac(u - e))) / (2 * h)
            D2 = 0.5 * (D2 + D2.transpose(0, 2, 1))
        else:
            h = 10 * self.step * (1.0 + np.max(np.abs(u)))
            D2 = np.zeros((4, 3, 3))
            f0 = alpha
            for i in range(3):
                ei = np.zeros(3)
                ei[i] = h
                for j in range(i, 3):
                    ej = np.zeros(3)
                    ej[j] = h
                    if i == j:
                        val = (np.asarray(self._alpha(u + ei)) - 2 * f0 + np.asarray(self._alpha(u - ei))) / h**2
                    else:
                        val = (np.asarray(self._alpha(u + ei + ej)) - np.asarray(self._alpha(u + ei - ej))
                               - np.asarray(self._alpha(u - ei + ej)) + np.asarray(self._alpha(u - ei - ej))) / (4 * h * h)
                    D2[:, i, j] = D2[:, j, i] = val
        return alpha, D1, D2


class GraphImmersion(ParametricImmersion):
    """Monge graph ``(u, h(u))`` of an arbitrary height function."""

    def __init__(self, height: Callable, grad: Callable | None = None,
                 hess: Callable | None = None, step: float = 1e-5,
                 simple: str = "upper", analytic: bool = False):
        def alpha(u):
            u = np.asarray(u)
            return np.concatenate([u, [height(u)]])

        jac = hs = None
        if grad is not None:
            def jac(u):
                J = np.zeros((4, 3), dtype=np.result_type(u, float))
                J[:3, :3] = np.eye(3)
                J[3] = grad(u)
                return J
        if hess is not None:
            def hs(u):
                H = np.zeros((4, 3, 3), dtype=np.result_type(u, float))
                H[3] = hess(u)
                return H
        super().__init__(alpha, jac, hs, step=step, simple=simple, analytic=analytic)


def as_immersion(obj) -> Immersion:
    if isinstance(obj, Immersion):
        return obj
    if isinstance(obj, MongeJet):
        return MongeImmersion(obj)
    raise TypeError(f"cannot treat {type(obj).__name__} as an immersion")
