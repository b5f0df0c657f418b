"""Fundamental forms restricted to the plane field P3 and the slope quadratic.

Substituting ``du3 = U du1 + V du2`` (U, V the plane-field slopes) into the
two fundamental forms gives binary quadratic forms, and the principal
slopes ``P = du2/du1`` inside P3 solve ``Lr P^2 + Mr P + Nr = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .derivatives import gradient
from .errors import AllCoefficientsZero
from .fundamental_forms import FormsSample, compute_forms
from .jet_model import MongeJet, as_immersion
from .principal_structure import PlaneFieldSample, plane_field, simple_curvature

__all__ = [
    "RestrictedSample",
    "SlopeRoots",
    "restrict_forms",
    "oracle_restricted",
    "oracle_plane_slopes",
    "slope_quadratic_roots",
    "LocalGeometry",
    "local_geometry",
    "restricted_coefficients",
    "restricted_with_gradient",
]


@dataclass(frozen=True)
class RestrictedSample:
    Er: float
    Fr: float
    Gr: float
    er: float
    fr: float
    gr: float
    Lr: float
    Mr: float
    Nr: float

    @classmethod
    def from_forms(cls, Er, Fr, Gr, er, fr, gr) -> "RestrictedSample":
        return cls(Er, Fr, Gr, er, fr, gr,
                   Lr=Fr * gr - fr * Gr, Mr=Er * gr - er * Gr, Nr=Er * fr - er * Fr)

    @property
    def lmn(self) -> np.ndarray:
        return np.array([self.Lr, self.Mr, self.Nr])


def _restrict(m, U, V):
    E = m[0, 0] + 2 * m[0, 2] * U + m[2, 2] * U**2
    F = m[0, 1] + m[0, 2] * V + m[1, 2] * U + m[2, 2] * U * V
    G = m[1, 1] + 2 * m[1, 2] * V + m[2, 2] * V**2
    return E, F, G


def restrict_forms(fs: FormsSample, pf: PlaneFieldSample) -> RestrictedSample:
    Er, Fr, Gr = _restrict(fs.g, pf.calU, pf.calV)
    er, fr, gr = _restrict(fs.lam, pf.calU, pf.calV)
    return RestrictedSample.from_forms(Er, Fr, Gr, er, fr, gr)


class LocalGeometry(NamedTuple):
    forms: FormsSample
    k3: float
    plane: PlaneFieldSample
    restricted: RestrictedSample


def local_geometry(imm, u) -> LocalGeometry:
    """Forms, simple curvature, plane field and restricted forms at ``u``."""
    imm = as_immersion(imm)
    fs = compute_forms(imm, u)
    k3 = simple_curvature(fs, imm.simple)
    pf = plane_field(fs, k3)
    return LocalGeometry(fs, k3, pf, restrict_forms(fs, pf))


def restricted_coefficients(imm, u) -> np.ndarray:
    """``[Lr, Mr, Nr, U, V]`` at ``u`` (complex-capable for analytic immersions)."""
    geo = local_geometry(imm, u)
    r = geo.restricted
    return np.array([r.Lr, r.Mr, r.Nr, geo.plane.calU, geo.plane.calV])


def restricted_with_gradient(imm, u):
    """Values of ``[Lr, Mr, Nr, U, V]`` and their u-gradients (5x3)."""
    imm = as_immersion(imm)
    return gradient(lambda z: restricted_coefficients(imm, z), u, imm.analytic)


class SlopeRoots(NamedTuple):
    roots: tuple  # finite real roots, ascending
    multiplicity: tuple
    infinite: bool  # the direction du1 = 0 solves the equation


def slope_quadratic_roots(rs, rel_tol: float = 1e-10) -> SlopeRoots:
    """Real roots of ``Lr P^2 + Mr P + Nr``, stable against cancellation."""
    if isinstance(rs, RestrictedSample):
        L, M, N = rs.Lr, rs.Mr, rs.Nr
        scale = max(abs(rs.er), abs(rs.fr), abs(rs.gr), 1e-300) * max(abs(rs.Er), abs(rs.Gr), 1.0)
    else:
        L, M, N = (float(x) for x in rs)
        scale = max(abs(L), abs(M), abs(N), 1e-300)
    if max(abs(L), abs(M), abs(N)) <= rel_tol * scale:
        raise AllCoefficientsZero("Lr, Mr, Nr all vanish: partially umbilic point")
    big = max(abs(L), abs(M), abs(N))
    if abs(L) <= 1e-14 * big:
        if abs(M) <= 1e-14 * big:  # only the infinite direction, doubly
            return SlopeRoots((), (), True)
        return SlopeRoots((-N / M,), (1,), True)
    disc = M * M - 4 * L * N
    if disc < -1e-12 * M * M - 1e-12 * abs(4 * L * N):
        return SlopeRoots((), (), False)
    disc = max(disc, 0.0)
    if disc <= 1e-24 * max(M * M, abs(4 * L * N)):
        return SlopeRoots((-M / (2 * L),), (2,), False)
    qq = -0.5 * (M + np.copysign(np.sqrt(disc), M))
    r1, r2 = qq / L, (N / qq if qq != 0 else -M / L - qq / L)
    lo, hi = sorted((r1, r2))
    return SlopeRoots((lo, hi), (1, 1), False)


# ------------------------------------------------------------------ series

def oracle_plane_slopes(jet: MongeJet, u):
    """Quadratic series of the plane-field slopes (U, V) about the origin."""
    k, k3 = jet.k, jet.k3
    a, b, c = jet.a, jet.b, jet.c
    q003, q012, q021, q102, q111, q201 = (jet.q003, jet.q012, jet.q021,
                                           jet.q102, jet.q111, jet.q201)
    Q013, Q022, Q031, Q103 = jet.Q013, jet.Q022, jet.Q031, jet.Q103
    Q112, Q121, Q202, Q211, Q301 = jet.Q112, jet.Q121, jet.Q202, jet.Q211, jet.Q301
    u1, u2, u3 = u
    dk = k - k3
    U = (2 * q201 * dk * u1 + 2 * q111 * dk * u2 + 2 * q102 * dk * u3
         + (-2 * q021 * b + 2 * q111 * q012 + k * Q121 - k3 * Q121) * u2**2
         + (2 * q003 * q102 - 2 * q201 * q102 + dk * Q103 - 2 * q111 * q012) * u3**2
         + (2 * k * k3**3 - 2 * q201**2 - 2 * k3 * Q202 - 2 * k3**2 * k**2 + 2 * k * Q202
            + 2 * q102**2 - 2 * q111**2 - 2 * a * q102 + 2 * q201 * q003) * u3 * u1
         + (-k3 * Q301 + 2 * q201 * q102 - 2 * q201 * a + Q301 * k) * u1**2
         + (-2 * k3 * Q112 + 2 * q012 * q102 - 2 * q111 * q021 + 2 * q003 * q111 - 2 * q012 * b
            - 2 * q201 * q111 + 2 * k * Q112) * u3 * u2
         + (-2 * a * q111 + 2 * q102 * q111 + 2 * q201 * q012 - 2 * q111 * b - 2 * k3 * Q211
            + 2 * Q211 * k) * u1 * u2) / (2 * dk**2)
    # the printed u2u3 bracket contains a bare "-2 q012"; kept as written
    V = (2 * q021 * dk * u2 + 2 * q111 * dk * u1 + 2 * q012 * dk * u3
         + (k * Q031 - 2 * q111 * b - 2 * q021 * c - k3 * Q031 + 2 * q012 * q021) * u2**2
         + (-2 * k3**2 * k**2 - 2 * q111**2 + 2 * k3**3 * k - 2 * q012 + 2 * k * Q022 - 2 * k3 * Q022
            - 2 * q021**2 - 2 * q102 * b + 2 * q012**2 + 2 * q021 * q003) * u3 * u2
         + (-2 * q111 * q201 + 2 * q003 * q111 + 2 * k * Q112 - 2 * q111 * q021 + 2 * q012 * q102
            - 2 * q012 * b - 2 * k3 * Q112) * u3 * u1
         + (-k3 * Q211 - 2 * q111 * b + 2 * q102 * q111 + Q211 * k) * u1**2
         + (k * Q013 + 2 * q003 * q012 - k3 * Q013 - 2 * q012 * q021 - 2 * q102 * q111) * u3**2
         + (-2 * q111 * c - 2 * q201 * b + 2 * k * Q121 + 2 * q102 * q021 - 2 * q021 * b
            - 2 * k3 * Q121 + 2 * q111 * q012) * u1 * u2) / (2 * dk**2)
    return U, V


def oracle_restricted(jet: MongeJet, u) -> RestrictedSample:
    """Quadratic series of the restricted forms about the origin."""
    k, k3 = jet.k, jet.k3
    a, b, c = jet.a, jet.b, jet.c
    q012, q021, q102, q111, q201 = jet.q012, jet.q021, jet.q102, jet.q111, jet.q201
    A, B, C, D, E = jet.A, jet.B, jet.C, jet.D, jet.E
    Q022, Q031, Q112, Q121, Q202, Q211, Q301 = (jet.Q022, jet.Q031, jet.Q112, jet.Q121,
                                                 jet.Q202, jet.Q211, jet.Q301)
    u1, u2, u3 = u
    s = (k - k3) ** 2
    w = 2 * k - k3
    Er = (1 + (k**2 + q201**2 / s) * u1**2 + 2 * q111 * q201 / s * u1 * u2 + 2 * q102 * q201 / s * u1 * u3
          + q111**2 / s * u2**2 + 2 * q102 * q111 / s * u2 * u3 + q102**2 / s * u3**2)
    Fr = ((q102 * q111 + q201 * q012) / s * u3 * u1 + q102 * q012 / s * u3**2 + q111 * q021 / s * u2**2
          + (q111**2 / s + k**2 + q201 * q021 / s) * u1 * u2 + (q102 * q021 + q111 * q012) / s * u2 * u3
          + q201 * q111 / s * u1**2)
    Gr = (1 + q012**2 / s * u3**2 + (k**2 + q021**2 / s) * u2**2 + q111**2 / s * u1**2
          + 2 * q021 * q012 / s * u2 * u3 + 2 * q111 * q021 / s * u1 * u2 + 2 * q012 * q111 / s * u1 * u3)
    er = (k + a * u1 + q201 * u3 + (A / 2 + w * q201**2 / s - k**3 / 2) * u1**2
          + (w * q111**2 / s + C / 2 - k**3 / 2) * u2**2
          + (Q202 / 2 + w * q102**2 / s - k * k3**2 / 2) * u3**2
          + (B + 2 * w * q201 * q111 / s) * u1 * u2 + (2 * w * q102 * q201 / s + Q301) * u1 * u3
          + (Q211 + 2 * w * q102 * q111 / s) * u2 * u3)
    fr = (b * u2 + q111 * u3 + (B / 2 + w * q201 * q111 / s) * u1**2
          + (w * q021 * q111 / s + D / 2) * u2**2 + (w * q012 * q102 / s + Q112 / 2) * u3**2
          + (C + w * q021 * q201 / s + w * q111**2 / s) * u1 * u2
          + (Q211 + w * q012 * q201 / s + w * q102 * q111 / s) * u1 * u3
          + (2 * Q121 + w * q012 * q111 / s + w * q021 * q102 / s) * u2 * u3)
    gr = (k + b * u1 + c * u2 + q021 * u3 + (-k**3 / 2 + C / 2 + w * q111**2 / s) * u1**2
          + (-k**3 / 2 + jet.E / 2 + w * q021**2 / s) * u2**2
          + (Q022 / 2 - k * k3**2 / 2 + w * q012**2 / s) * u3**2
          + (D + 2 * w * q021 * q111 / s) * u1 * u2 + (Q121 + 2 * w * q012 * q111 / s) * u1 * u3
          + (Q031 + 2 * w * q012 * q021 / s) * u2 * u3)
    return RestrictedSample.from_forms(Er, Fr, Gr, er, fr, gr)
