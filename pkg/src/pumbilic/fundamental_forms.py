"""First and second fundamental forms of a hypersurface in R^4.

``compute_forms`` works from the derivatives of an immersion;
``oracle_forms`` evaluates truncated Taylor series of the same quantities in
a Monge chart, term by term as written in the reference expansions, so the
two can be compared by a convergence-order sweep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RankDeficient
from .jet_model import Immersion, MongeJet, as_immersion

__all__ = ["FormsSample", "wedge3", "compute_forms", "oracle_forms", "oracle_normal"]


@dataclass(frozen=True)
class FormsSample:
    g: np.ndarray  # (3, 3)
    lam: np.ndarray  # (3, 3), second fundamental form
    N: np.ndarray  # (4,)

    @property
    def lambda_(self) -> np.ndarray:
        return self.lam


def _det3(m):
    return (m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
            - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
            + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0]))


def wedge3(D1) -> np.ndarray:
    """Generalized cross product of the three columns of a 4x3 matrix.

    Component ``m`` is det[a1 a2 a3 e_m], so (e1, e2, e3) maps to +e4.
    """
    D1 = np.asarray(D1)
    out = np.empty(4, dtype=D1.dtype)
    for m in range(4):
        rows = [r for r in range(4) if r != m]
        out[m] = (-1) ** (m + 3) * _det3(D1[rows, :])
    return out


def compute_forms(imm, u, rank_tol: float = 1e-12) -> FormsSample:
    """Forms at ``u``; complex ``u`` is propagated analytically (no conjugation)."""
    imm = as_immersion(imm)
    _, D1, D2 = imm.derivatives(u)
    g = D1.T @ D1
    n = wedge3(D1)
    nn = np.sum(n * n)
    scale = np.prod(np.sqrt(np.abs(np.diag(g)).real))
    if abs(nn) <= (rank_tol * max(scale, 1e-300)) ** 2:
        raise RankDeficient(f"derivative matrix has rank < 3 at u={np.real(u)}")
    N = n / np.sqrt(nn)
    lam = np.einsum("aij,a->ij", D2, N)
    lam = 0.5 * (lam + lam.T)
    g = 0.5 * (g + g.T)
    return FormsSample(g=g, lam=lam, N=N)


# ------------------------------------------------------------------ series

def oracle_forms(jet: MongeJet, u) -> FormsSample:
    """Truncated Monge-chart series for g (to cubic order), N (cubic) and lambda (quadratic)."""
    k, k3 = jet.k, jet.k3
    a, b, c = jet.a, jet.b, jet.c
    q003, q012, q021, q102, q111, q201 = (jet.q003, jet.q012, jet.q021,
                                           jet.q102, jet.q111, jet.q201)
    A, B, C, D, E = jet.A, jet.B, jet.C, jet.D, jet.E
    Q004, Q013, Q022, Q031, Q103 = jet.Q004, jet.Q013, jet.Q022, jet.Q031, jet.Q103
    Q112, Q121, Q202, Q211, Q301 = jet.Q112, jet.Q121, jet.Q202, jet.Q211, jet.Q301
    u1, u2, u3 = u

    g11 = (1 + k**2 * u1**2 + k * a * u1**3 + b * k * u2**2 * u1 + k * q102 * u3**2 * u1
           + 2 * k * q111 * u2 * u3 * u1 + 2 * k * q201 * u1**2 * u3)
    g12 = (k**2 * u1 * u2 + k * q111 * u3 * u1**2 + k * c / 2 * u1 * u2**2
           + (k * q021 + q201 * k) * u3 * u2 * u1 + k * (b + a / 2) * u1**2 * u2
           + k * q012 / 2 * u3**2 * u1 + b * k / 2 * u2**3 + k * q111 * u3 * u2**2
           + q102 * u3**2 * k * u2)
    g13 = (k3 * u1 * u3 + k * q201 / 2 * u1**3 + k * q111 * u1**2 * u2
           + (k * q102 + a * k3 / 2) * u3 * u1**2 + k * q021 / 2 * u2**2 * u1
           + k * q012 * u3 * u2 * u1 + (k * q003 / 2 + q201) * u3**2 * u1
           + b * k3 / 2 * u3 * u2**2 + q111 * k3 * u3**2 * u2 + q102 * k3 / 2 * u3**3)
    g22 = (1 + k**2 * u2**2 + k * c * u2**3 + 2 * k * q021 * u2**2 * u3 + k * q012 * u3**2 * u2
           + 2 * k * b * u1 * u2**2 + 2 * k * q111 * u2 * u3 * u1)
    g23 = (k * k3 * u2 * u3 + 0.5 * k * q201 * u2 * u1**2 + k * q111 * u2**2 * u1
           + (k * q102 + b * k3) * u3 * u2 * u1 + q111 * k3 * u3**2 * u1 + 0.5 * k * q021 * u2**3
           + (k * q012 + c * k3 / 2) * u3 * u2**2 + (0.5 * k * q003 + q021 * k3) * u3**2 * u2
           + k3 * q012 / 2 * u3**3)
    g33 = (1 + k3**2 * u3**2 + q021 * k3 * u2**2 * u3 + q003 * k3 * u3**3 + 2 * q102 * k3 * u1 * u3**2
           + q201 * k3 * u1**2 * u3 + 2 * k3 * q012 * u3**2 * u2 + 2 * k3 * q111 * u1 * u2 * u3)

    l11 = (k + a * u1 + q201 * u3 + (-0.5 * k**3 + 0.5 * A) * u1**2 + B * u1 * u2 + Q301 * u1 * u3
           + (-0.5 * k**3 + 0.5 * C) * u2**2 + Q211 * u3 * u2 + (-k * k3**2 / 2 + 0.5 * Q202) * u3**2)
    l12 = (q111 * u3 + b * u2 + Q121 * u3 * u2 + 0.5 * Q112 * u3**2 + Q211 * u3 * u1 + 0.5 * D * u2**2
           + C * u1 * u2 + 0.5 * B * u1**2)
    l13 = (q201 * u1 + q111 * u2 + q102 * u3 + 0.5 * Q103 * u3**2 + Q112 * u3 * u2 + Q211 * u2 * u1
           + Q202 * u1 * u3 + 0.5 * Q301 * u1**2 + 0.5 * Q121 * u2**2)
    l22 = (k + c * u2 + q021 * u3 + b * u1 + (-0.5 * k**3 + 0.5 * C) * u1**2 + Q121 * u3 * u1
           + D * u1 * u2 + (-0.5 * k**3 + 0.5 * E) * u2**2 + Q031 * u3 * u2
           + (-k3**2 * k / 2 + 0.5 * Q022) * u3**2)
    l23 = (q012 * u3 + q111 * u1 + q021 * u2 + 0.5 * Q013 * u3**2 + Q112 * u3 * u1 + Q121 * u2 * u1
           + 0.5 * Q031 * u2**2 + Q022 * u2 * u3 + 0.5 * Q211 * u1**2)
    # the u1^2 coefficient is typeset as a malformed fraction; read as -k3 k^2 / 2,
    # the same shape as the u2^2 coefficient
    l33 = (k3 + q012 * u2 + q102 * u1 + q003 * u3
           + (-k3 * k**2 / 2 + 0.5 * Q202) * u1**2
           + Q112 * u1 * u2 + Q013 * u3 * u2 + (-k3 * k**2 / 2 + 0.5 * Q022) * u2**2
           + (0.5 * Q004 - k3**3 / 2) * u3**2)

    g = np.array([[g11, g12, g13], [g12, g22, g23], [g13, g23, g33]])
    lam = np.array([[l11, l12, l13], [l12, l22, l23], [l13, l23, l33]])
    return FormsSample(g=g, lam=lam, N=oracle_normal(jet, u))


def oracle_normal(jet: MongeJet, u) -> np.ndarray:
    k, k3 = jet.k, jet.k3
    a, b, c = jet.a, jet.b, jet.c
    q003, q012, q021, q102, q111, q201 = (jet.q003, jet.q012, jet.q021,
                                           jet.q102, jet.q111, jet.q201)
    A, B, C, D, E = jet.A, jet.B, jet.C, jet.D, jet.E
    Q004, Q013, Q022, Q031, Q103 = jet.Q004, jet.Q013, jet.Q022, jet.Q031, jet.Q103
    Q112, Q121, Q202, Q211, Q301 = jet.Q112, jet.Q121, jet.Q202, jet.Q211, jet.Q301
    u1, u2, u3 = u
    n1 = (-u1 * k - 0.5 * q102 * u3**2 - 0.5 * a * u1**2 - q111 * u2 * u3 - 0.5 * b * u2**2
          - q201 * u1 * u3 - 0.5 * Q112 * u3**2 * u2 - Q211 * u1 * u2 * u3 - Q103 / 6 * u3**3
          - 0.5 * Q121 * u3 * u2**2 - D / 6 * u2**3 + (-0.5 * C + 0.5 * k**3) * u1 * u2**2
          + (-0.5 * Q202 + 0.5 * k * k3**2) * u1 * u3**2 - 0.5 * Q301 * u1**2 * u3
          + (-A / 6 + 0.5 * k**3) * u1**3 - B * u1**2 * u2)
    n2 = (-u2 * k - 0.5 * q012 * u3**2 - b * u1 * u2 - 0.5 * c * u2**2 - q111 * u1 * u3
          - q021 * u2 * u3 - Q121 * u3 * u2 * u1 - Q013 / 6 * u3**3 - Q031 * u3 * u2**2
          - 0.5 * Q112 * u3**2 * u1 - 0.5 * Q211 * u3 * u1**2 - 0.5 * D * u1 * u2**2
          + (-0.5 * C + 0.5 * k**3) * u1**2 * u2 + (-0.5 * Q022 + 0.5 * k * k3**2) * u2 * u3**2
          + (-E / 6 + 0.5 * k**3) * u2**3 - B / 6 * u1**3)
    n3 = (-k3 * u3 - 0.5 * q201 * u1**2 - 0.5 * q003 * u3**2 - q102 * u1 * u3 - q111 * u1 * u2
          - 0.5 * q021 * u2**2 - q012 * u3 * u2 - 0.5 * Q211 * u2 * u1**2 - 0.5 * Q103 * u3**2 * u1
          + (-Q202 + 0.5 * k**2) * u1**2 * u3 - 0.5 * Q013 * u3**2 * u2 - 0.5 * Q121 * u2**2 * u1
          + (-0.5 * Q022 + 0.5 * k**2) * u2**2 * u3 - Q301 / 6 * u1**3 - Q112 * u3 * u1 * u2
          - Q031 / 6 * u2**3 + (-Q004 / 6 + 0.5) * u3**3)
    n4 = (1 - 0.5 * u2**2 * k**2 - 0.5 * u1**2 * k**2 - k3**2 / 2 * u3**2 - 0.5 * k * a * u1**3
          + (-0.5 * k - 1) * q012 * u3**2 * u2 + (-0.5 * k - 1) * q102 * u1 * u3**2
          - 0.5 * q003 * u3**3 - 1.5 * b * k * u2**2 * u1 + (-2 * k - 1) * q111 * u1 * u3 * u2
          - 0.5 * k * c * u2**3 + (-k - 0.5) * q201 * u3 * u1**2 + (-k - 0.5) * q021 * u3 * u2**2)
    return np.array([n1, n2, n3, n4])
