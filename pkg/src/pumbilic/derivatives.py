"""Derivatives of smooth chart functions.

For immersions that can be evaluated at complex points, first derivatives
use the complex-step rule ``f'(x) = Im f(x + i h) / h``, which has no
subtractive cancellation.  Otherwise, and for second derivatives, central
differences with one Richardson step are used.
"""

from __future__ import annotations

import numpy as np

__all__ = ["gradient", "jacobian_fd"]

_CSTEP = 1e-30


def gradient(fun, u, analytic: bool, step: float = 1e-5) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(f(u), df/du)`` for an array-valued ``fun`` of a 3-vector.

    The derivative array has the input axis last: shape ``f.shape + (3,)``.
    """
    u = np.asarray(u, dtype=float)
    if analytic:
        f0 = None
        cols = []
        for i in range(u.size):
            z = u.astype(complex)
            z[i] += 1j * _CSTEP
            fz = np.asarray(fun(z))
            if f0 is None:
                f0 = fz.real
            cols.append(fz.imag / _CSTEP)
        return f0, np.stack(cols, axis=-1)
    f0 = np.asarray(fun(u), dtype=float)
    return f0, jacobian_fd(fun, u, step)


def jacobian_fd(fun, x, step: float = 1e-5) -> np.ndarray:
    """Central differences with one Richardson extrapolation (error O(h^4))."""
    x = np.asarray(x, dtype=float)
    h = step * max(1.0, float(np.max(np.abs(x))))
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = 1.0

        def d(hh):
            return (np.asarray(fun(x + hh * e), dtype=float) - np.asarray(fun(x - hh * e), dtype=float)) / (2 * hh)

        d1, d2 = d(h), d(h / 2)
        cols.append((4 * d2 - d1) / 3)
    return np.stack(cols, axis=-1)
