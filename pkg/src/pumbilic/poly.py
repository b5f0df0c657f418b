"""Dense truncated polynomials in three variables.

Coefficients are stored in an array ``c[i, j, l]`` for the monomial
``u1**i * u2**j * u3**l``; every monomial of total degree above ``order``
is discarded after each operation.  This is just enough algebra to rotate
and invert Monge jets exactly (numerically, not symbolically).
"""

from __future__ import annotations

import itertools
from math import factorial

import numpy as np

__all__ = ["TruncPoly"]


class TruncPoly:
    __slots__ = ("c", "order")

    def __init__(self, coeffs, order: int):
        c = np.zeros((order + 1,) * 3, dtype=np.result_type(np.asarray(coeffs), float))
        src = np.asarray(coeffs)
        n = min(src.shape[0], order + 1)
        c[:n, :n, :n] = src[:n, :n, :n]
        self.c = c
        self.order = order
        self._truncate()

    def _truncate(self) -> None:
        n = self.order
        i, j, l = np.indices(self.c.shape)
        self.c[i + j + l > n] = 0

    @classmethod
    def zero(cls, order: int) -> "TruncPoly":
        return cls(np.zeros((order + 1,) * 3), order)

    @classmethod
    def constant(cls, value: float, order: int) -> "TruncPoly":
        p = cls.zero(order)
        p.c[0, 0, 0] = value
        return p

    @classmethod
    def variable(cls, index: int, order: int, scale: float = 1.0) -> "TruncPoly":
        p = cls.zero(order)
        e = [0, 0, 0]
        e[index] = 1
        p.c[tuple(e)] = scale
        return p

    @classmethod
    def from_derivatives(cls, derivs: dict, order: int) -> "TruncPoly":
        """Build from Taylor data ``{(i, j, l): d^(i+j+l) f / du^(i,j,l) at 0}``."""
        p = cls.zero(order)
        for (i, j, l), v in derivs.items():
            if i + j + l <= order:
                p.c[i, j, l] += v / (factorial(i) * factorial(j) * factorial(l))
        return p

    def derivative_at_zero(self, idx) -> float:
        i, j, l = idx
        return float(self.c[i, j, l].real) * factorial(i) * factorial(j) * factorial(l)

    def __add__(self, other):
        if isinstance(other, TruncPoly):
            return TruncPoly(self.c + other.c, self.order)
        out = TruncPoly(self.c.copy(), self.order)
        out.c[0, 0, 0] += other
        return out

    __radd__ = __add__

    def __neg__(self):
        return TruncPoly(-self.c, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncPoly):
            return TruncPoly(self.c * other, self.order)
        n = self.order
        out = np.zeros_like(self.c)
        nz = np.argwhere(self.c != 0)
        for i, j, l in nz:
            d = n - (i + j + l)
            if d < 0:
                continue
            block = other.c[: d + 1, : d + 1, : d + 1]
            out[i : i + d + 1, j : j + d + 1, l : l + d + 1] += self.c[i, j, l] * block
        return TruncPoly(out, n)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncPoly):
            return NotImplemented
        return TruncPoly(self.c / other, self.order)

    def __pow__(self, k: int):
        out = TruncPoly.constant(1.0, self.order)
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, u):
        """Evaluate at a point (real or complex)."""
        u = np.asarray(u)
        total = 0
        for i, j, l in np.argwhere(self.c != 0):
            total = total + self.c[i, j, l] * u[0] ** i * u[1] ** j * u[2] ** l
        return total

    def compose(self, subs) -> "TruncPoly":
        """Substitute ``u_m -> subs[m]``; each ``subs[m]`` must vanish at 0."""
        n = self.order
        powers = []
        for s in subs:
            if abs(s.c[0, 0, 0]) != 0:
                raise ValueError("substituted series must have zero constant term")
            row = [TruncPoly.constant(1.0, n)]
            for _ in range(n):
                row.append(row[-1] * s)
            powers.append(row)
        out = TruncPoly.zero(n)
        for i, j, l in np.argwhere(self.c != 0):
            out = out + (powers[0][i] * powers[1][j] * powers[2][l]) * self.c[i, j, l]
        return out

    def homogeneous(self, degree: int) -> "TruncPoly":
        i, j, l = np.indices(self.c.shape)
        return TruncPoly(np.where(i + j + l == degree, self.c, 0), self.order)

    def monomials(self):
        n = self.order
        for i, j, l in itertools.product(range(n + 1), repeat=3):
            if i + j + l <= n:
                yield (i, j, l), self.c[i, j, l]
