"""Principal curvatures, the smooth simple branch k3 and the plane field P3.

Curvatures are pencil eigenvalues ``lam v = k g v``.  Near a curve where two
curvatures coincide, the third one stays simple and smooth; its eigenvector
e3 is the third column of adj(lam - k3 g), written out as (U1, V1, W1), and
the plane field P3 is its g-orthogonal complement, the kernel of
``omega = g (U1, V1, W1)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .derivatives import gradient
from .errors import DegeneratePlane, NotPositiveDefinite
from .fundamental_forms import FormsSample, compute_forms
from .jet_model import MongeJet, as_immersion

__all__ = [
    "PrincipalData",
    "PlaneFieldSample",
    "principal_solve",
    "simple_curvature",
    "k3_branch_oracle",
    "plane_field",
    "uvw_oracle",
    "integrability_density",
    "integrability_linear_oracle",
    "default_eps_umb",
]


def default_eps_umb(k3: float) -> float:
    return 1e-8 * (1.0 + abs(k3))


@dataclass(frozen=True)
class PrincipalData:
    k1: float
    k2: float
    k3: float
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    gap12: float
    gap23: float
    nonunique12: bool = False
    nonunique23: bool = False

    @property
    def curvatures(self) -> np.ndarray:
        return np.array([self.k1, self.k2, self.k3])

    @property
    def directions(self) -> np.ndarray:
        return np.stack([self.e1, self.e2, self.e3])


def _fix_sign(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v) > np.max(np.abs(v)) * (1 - 1e-12)))  # lowest index among maxima
    return v if v[i] >= 0 else -v


def principal_solve(fs: FormsSample, eps_umb: float | None = None) -> PrincipalData:
    g = np.real(fs.g)
    lam = np.real(fs.lam)
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("first fundamental form is not positive definite") from exc
    w, V = scipy.linalg.eigh(lam, g)
    if eps_umb is None:
        eps_umb = default_eps_umb(w[2])
    vecs = [_fix_sign(V[:, i]) for i in range(3)]
    return PrincipalData(
        k1=float(w[0]), k2=float(w[1]), k3=float(w[2]),
        e1=vecs[0], e2=vecs[1], e3=vecs[2],
        gap12=float(w[1] - w[0]), gap23=float(w[2] - w[1]),
        nonunique12=bool(w[1] - w[0] < eps_umb),
        nonunique23=bool(w[2] - w[1] < eps_umb),
    )


def _adj_col3(M):
    U = M[0, 1] * M[1, 2] - M[0, 2] * M[1, 1]
    V = M[0, 2] * M[1, 0] - M[0, 0] * M[1, 2]
    W = M[0, 0] * M[1, 1] - M[0, 1] ** 2
    return U, V, W


def _char_poly(fs: FormsSample, kk):
    M = fs.lam - kk * fs.g
    det = (M[0, 0] * (M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1])
           - M[0, 1] * (M[1, 0] * M[2, 2] - M[1, 2] * M[2, 0])
           + M[0, 2] * (M[1, 0] * M[2, 1] - M[1, 1] * M[2, 0]))
    # d/dk det(lam - k g) = -tr(adj(M) g)
    adj = np.array([
        [M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1], M[0, 2] * M[2, 1] - M[0, 1] * M[2, 2], M[0, 1] * M[1, 2] - M[0, 2] * M[1, 1]],
        [M[1, 2] * M[2, 0] - M[1, 0] * M[2, 2], M[0, 0] * M[2, 2] - M[0, 2] * M[2, 0], M[0, 2] * M[1, 0] - M[0, 0] * M[1, 2]],
        [M[1, 0] * M[2, 1] - M[1, 1] * M[2, 0], M[0, 1] * M[2, 0] - M[0, 0] * M[2, 1], M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]],
    ])
    return det, -np.trace(adj @ fs.g)


def simple_curvature(fs: FormsSample, simple: str = "upper", newton_steps: int = 2):
    """The simple principal curvature (largest for "upper", smallest for "lower").

    The real eigenvalue is refined by Newton steps on det(lam - k g) so that a
    complex-perturbed sample yields the analytic continuation of the branch.
    """
    w = scipy.linalg.eigh(np.real(fs.lam), np.real(fs.g), eigvals_only=True)
    kk = w[2] if simple == "upper" else w[0]
    if np.iscomplexobj(fs.g) or np.iscomplexobj(fs.lam):
        kk = complex(kk)
        for _ in range(newton_steps):
            p, dp = _char_poly(fs, kk)
            if dp == 0:
                break
            kk = kk - p / dp
    return kk


@dataclass(frozen=True)
class PlaneFieldSample:
    U1: float
    V1: float
    W1: float
    omega: np.ndarray
    calU: float
    calV: float

    @property
    def e3_direction(self) -> np.ndarray:
        return np.array([self.U1, self.V1, self.W1])


def plane_field(fs: FormsSample, k3, tol: float = 1e-12) -> PlaneFieldSample:
    U1, V1, W1 = _adj_col3(fs.lam - k3 * fs.g)
    vec = np.array([U1, V1, W1])
    omega = fs.g @ vec
    ref = (np.max(np.abs(np.real(fs.lam))) + abs(np.real(k3)) * np.max(np.abs(np.real(fs.g)))) ** 2
    if np.max(np.abs(vec)) <= tol * max(ref, 1e-300):
        raise DegeneratePlane("(U1, V1, W1) vanishes: the simple curvature is no longer simple")
    if abs(omega[2]) <= tol * np.max(np.abs(omega)):
        raise DegeneratePlane("plane field contains the u3 direction; slopes undefined")
    return PlaneFieldSample(U1=U1, V1=V1, W1=W1, omega=omega,
                            calU=-omega[0] / omega[2], calV=-omega[1] / omega[2])


def integrability_density(imm, u) -> float:
    """Scalar density of omega ^ d omega with respect to du1 ^ du2 ^ du3."""
    imm = as_immersion(imm)
    simple = imm.simple

    def om(z):
        fs = compute_forms(imm, z)
        return plane_field(fs, simple_curvature(fs, simple)).omega

    w, dw = gradient(om, u, imm.analytic)  # dw[i, j] = d omega_i / d u_j
    return float(w[0] * (dw[2, 1] - dw[1, 2]) + w[1] * (dw[0, 2] - dw[2, 0]) + w[2] * (dw[1, 0] - dw[0, 1]))


# ------------------------------------------------------------------ series

def k3_branch_oracle(jet: MongeJet, u) -> float:
    """Quadratic Taylor series of the simple curvature about the origin."""
    k, k3 = jet.k, jet.k3
    q003, q012, q021, q102, q111, q201 = (jet.q003, jet.q012, jet.q021,
                                           jet.q102, jet.q111, jet.q201)
    Q004, Q013, Q022, Q103, Q112, Q202 = jet.Q004, jet.Q013, jet.Q022, jet.Q103, jet.Q112, jet.Q202
    u1, u2, u3 = u
    dk = k - k3
    return (k3 + q102 * u1 + q012 * u2 + q003 * u3
            - (k3 * k**2 * dk - k * Q202 + 2 * q201**2 + k3 * Q202 + 2 * q111**2) / dk * u1**2
            + (k * Q112 - 2 * q201 * q111 - k3 * Q112 - 2 * q111 * q021) / dk * u1 * u2
            - (k3 * k**2 * dk - k * Q022 + 2 * q111**2 + 2 * q021**2 + k3 * Q022) / dk * u2**2
            + (k * Q103 - 2 * q012 * q111 - 2 * q201 * q102 - Q103 * k3) / dk * u1 * u3
            + (k * Q013 - 2 * q102 * q111 - 2 * q021 * q012 - k3 * Q013) / dk * u2 * u3
            + (k * Q004 - 3 * k3**3 * k + 3 * k3**4 - 2 * q102**2 - k3 * Q004 - 2 * q012**2) / dk * u3**2)


def uvw_oracle(jet: MongeJet, u):
    """Series of (U1, V1, W1): quadratic order for U1, V1 and linear for W1."""
    k, k3 = jet.k, jet.k3
    a, b, c = jet.a, jet.b, jet.c
    q003, q012, q021, q102, q111, q201 = (jet.q003, jet.q012, jet.q021,
                                           jet.q102, jet.q111, jet.q201)
    Q013, Q022, Q031, Q103 = jet.Q013, jet.Q022, jet.Q031, jet.Q103
    Q112, Q121, Q202, Q211, Q301 = jet.Q112, jet.Q121, jet.Q202, jet.Q211, jet.Q301
    u1, u2, u3 = u
    U1 = ((k3 - k) * q201 * u1 + (k3 - k) * q111 * u2 + (k3 - k) * q102 * u3
          + (0.5 * Q301 * (k3 - k) - q201 * (b + q102)) * u1**2
          + (q021 * b - c * q111 + 0.5 * (k3 - k) * Q121 + q111 * q012) * u2**2
          + (-q201 * c + q201 * q012 + q111 * q102 + Q211 * (k3 - k)) * u1 * u2
          + (q111**2 + (k3**2 * k - Q202) * (k - k3) + q201 * (q003 - q021) + (q102 - b) * q102) * u1 * u3
          + (q012 * b - q102 * c + (-k + k3) * Q112 + q003 * q111 + q012 * q102) * u2 * u3
          + (q111 * q012 - q102 * q021 + 0.5 * (k3 - k) * Q103 + q003 * q102) * u3**2)
    V1 = ((k3 - k) * q111 * u1 + (k3 - k) * q021 * u2 + (k3 - k) * q012 * u3
          + (q111 * (q102 - a) - 0.5 * Q211 * (k - k3)) * u1**2
          + (q111 * b + q012 * q021 + 0.5 * (k3 - k) * Q031) * u2**2
          + (q111 * q012 + q201 * b + (k3 - k) * Q121 + q102 * q021 - a * q021) * u1 * u2
          + (q003 * q111 + q012 * (q102 - a) + (k3 - k) * Q112) * u1 * u3
          + (q102 * b + q111**2 - q201 * q021 + q021 * q003 + q012**2 + (k3**2 * k - Q022) * (k - k3)) * u2 * u3
          + (0.5 * (k3 - k) * Q013 - q201 * q012 + q111 * q102 + q003 * q012) * u3**2)
    W1 = ((k - k3) ** 2 + (k - k3) * (a + b - 2 * q102) * u1 + (k - k3) * (c - 2 * q012) * u2
          + (k3 - k) * (2 * q003 - q021 - q201) * u3)
    return U1, V1, W1


def integrability_linear_oracle(jet: MongeJet) -> np.ndarray:
    """Linear coefficients (d/du1, d/du2, d/du3) of omega ^ d omega at the origin."""
    j = jet
    dk2 = (j.k - j.k3) ** 2
    return np.array([-dk2 * j.q111 * (j.a - j.b),
                     -dk2 * (j.b * (j.q021 - j.q201) - j.c * j.q111),
                     0.0])
