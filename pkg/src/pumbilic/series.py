"""Taylor expansions of the local geometry of a Monge jet, by series arithmetic.

The height of a :class:`MongeJet` is a polynomial, so every quantity built
from it (metric, normal, second form, simple curvature, plane field,
restricted forms, cubic coefficients) has a Taylor expansion that can be
computed exactly with truncated polynomial arithmetic.  The results serve
as an independent reference for the hand-expanded truncations and for the
pointwise numerics.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np

from .jet_model import MongeJet
from .poly import TruncPoly

__all__ = ["JetSeries", "jet_series", "diff", "apply_scalar", "inverse", "inv_sqrt"]


def diff(p: TruncPoly, var: int) -> TruncPoly:
    """Partial derivative; the result is exact to one order less."""
    c = np.zeros_like(p.c)
    n = p.order
    sl = [slice(None)] * 3
    for e in range(1, n + 1):
        src = list(sl)
        src[var] = e
        dst = list(sl)
        dst[var] = e - 1
        c[tuple(dst)] = e * p.c[tuple(src)]
    return TruncPoly(c, n)


def apply_scalar(p: TruncPoly, derivs) -> TruncPoly:
    """``f(p)`` from ``derivs[m] = f^(m)(p(0))`` by the Taylor series of ``f``."""
    x = p - p.c[0, 0, 0]
    out = TruncPoly.constant(derivs[0], p.order)
    term = TruncPoly.constant(1.0, p.order)
    for m in range(1, p.order + 1):
        term = term * x
        out = out + term * (derivs[m] / factorial(m))
    return out


def inverse(p: TruncPoly) -> TruncPoly:
    c0 = p.c[0, 0, 0]
    if c0 == 0:
        raise ZeroDivisionError("series has zero constant term")
    return apply_scalar(p, [(-1) ** m * factorial(m) / c0 ** (m + 1) for m in range(p.order + 1)])


def inv_sqrt(p: TruncPoly) -> TruncPoly:
    c0 = p.c[0, 0, 0]
    ds, coef = [], 1.0
    for m in range(p.order + 1):
        ds.append(coef * c0 ** (-0.5 - m))
        coef *= -0.5 - m
    return apply_scalar(p, ds)


def _det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


@dataclass
class JetSeries:
    order: int
    g: list
    lam: list
    N: list
    k3: TruncPoly
    U1: TruncPoly
    V1: TruncPoly
    W1: TruncPoly
    calU: TruncPoly
    calV: TruncPoly
    restricted: dict  # Er, Fr, Gr, er, fr, gr, Lr, Mr, Nr
    cubic: list  # A3, A2, A1, A0

    def get(self, name: str) -> TruncPoly:
        """Look up a component by the registry name (``g13``, ``lambda22``, ``n4``, ``Lr``, ``A0`` ...)."""
        if name.startswith("lambda"):
            i, j = int(name[6]) - 1, int(name[7]) - 1
            return self.lam[i][j]
        if name[0] == "g" and len(name) == 3 and name[1:].isdigit():
            return self.g[int(name[1]) - 1][int(name[2]) - 1]
        if name[0] == "n" and name[1:].isdigit():
            return self.N[int(name[1]) - 1]
        if name in self.restricted:
            return self.restricted[name]
        if name in ("A3", "A2", "A1", "A0"):
            return self.cubic[3 - int(name[1])]
        return getattr(self, name)


def _truncate(p: TruncPoly, degree: int) -> TruncPoly:
    i, j, l = np.indices(p.c.shape)
    return TruncPoly(np.where(i + j + l <= degree, p.c, 0), p.order)


@lru_cache(maxsize=256)
def jet_series(jet: MongeJet, order: int = 3) -> JetSeries:
    """Series of the local geometry of ``jet`` exact through degree ``order``.

    The simple curvature is the branch through ``k3`` at the origin, obtained
    by Newton iteration on ``det(lam - kappa g)``.
    """
    n = order + 1
    h = jet.to_poly(4)
    h = TruncPoly(h.c, max(4, n + 1))
    hd = [diff(h, i) for i in range(3)]
    hdd = [[diff(hd[i], j) for j in range(3)] for i in range(3)]

    def cut(p):
        return TruncPoly(p.c[: n + 1, : n + 1, : n + 1], n)

    hd = [cut(p) for p in hd]
    hdd = [[cut(hdd[i][j]) for j in range(3)] for i in range(3)]
    g = [[hd[i] * hd[j] + (1.0 if i == j else 0.0) for j in range(3)] for i in range(3)]
    W = 1.0 + hd[0] * hd[0] + hd[1] * hd[1] + hd[2] * hd[2]
    s = inv_sqrt(W)
    lam = [[hdd[i][j] * s for j in range(3)] for i in range(3)]
    N = [-hd[0] * s, -hd[1] * s, -hd[2] * s, s]

    kappa = TruncPoly.constant(jet.k3, n)
    for _ in range(int(np.ceil(np.log2(n + 1))) + 1):
        M = [[lam[i][j] - kappa * g[i][j] for j in range(3)] for i in range(3)]
        F = _det3(M)
        # dF/dkappa = -trace(adj(M) g)
        adj = [[None] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(3):
                r = [x for x in range(3) if x != j]
                cidx = [x for x in range(3) if x != i]
                minor = M[r[0]][cidx[0]] * M[r[1]][cidx[1]] - M[r[0]][cidx[1]] * M[r[1]][cidx[0]]
                adj[i][j] = minor * ((-1) ** (i + j))
        dF = -sum((adj[i][j] * g[j][i] for i in range(3) for j in range(3)), TruncPoly.zero(n))
        kappa = kappa - F * inverse(dF)

    M = [[lam[i][j] - kappa * g[i][j] for j in range(3)] for i in range(3)]
    # third column of the adjugate
    U1 = M[0][1] * M[1][2] - M[0][2] * M[1][1]
    V1 = M[0][2] * M[1][0] - M[0][0] * M[1][2]
    W1 = M[0][0] * M[1][1] - M[0][1] * M[1][0]
    vec = [U1, V1, W1]
    om = [sum((g[i][j] * vec[j] for j in range(3)), TruncPoly.zero(n)) for i in range(3)]
    inv3 = inverse(om[2])
    calU, calV = -om[0] * inv3, -om[1] * inv3

    def restrict(m):
        E = m[0][0] + 2.0 * m[0][2] * calU + m[2][2] * calU * calU
        F = m[0][1] + m[0][2] * calV + m[1][2] * calU + m[2][2] * calU * calV
        G = m[1][1] + 2.0 * m[1][2] * calV + m[2][2] * calV * calV
        return E, F, G

    Er, Fr, Gr = restrict(g)
    er, fr, gr = restrict(lam)
    Lr, Mr, Nr = Fr * gr - fr * Gr, Er * gr - er * Gr, Er * fr - er * Fr
    rest = dict(Er=Er, Fr=Fr, Gr=Gr, er=er, fr=fr, gr=gr, Lr=Lr, Mr=Mr, Nr=Nr)

    dL = [diff(Lr, i) for i in range(3)]
    dM = [diff(Mr, i) for i in range(3)]
    dN = [diff(Nr, i) for i in range(3)]
    A3 = -(dL[1] + calV * dL[2])
    A2 = -(dL[0] + dM[1] + calU * dL[2] + calV * dM[2])
    A1 = -(dM[0] + dN[1] + calU * dM[2] + calV * dN[2])
    A0 = -(dN[0] + calU * dN[2])

    t = lambda p: _truncate(p, order)
    return JetSeries(
        order=order,
        g=[[t(x) for x in row] for row in g],
        lam=[[t(x) for x in row] for row in lam],
        N=[t(x) for x in N],
        k3=t(kappa), U1=t(U1), V1=t(V1), W1=t(W1), calU=t(calU), calV=t(calV),
        restricted={key: t(v) for key, v in rest.items()},
        cubic=[t(p) for p in (A3, A2, A1, A0)],
    )


def truncated_value(jet: MongeJet, name: str, u, degree: int) -> float:
    """Value at ``u`` of the expansion of ``name`` cut at total degree ``degree``."""
    p = jet_series(jet, max(degree, 3)).get(name)
    return float(np.real(_truncate(p, degree)(np.asarray(u))))
