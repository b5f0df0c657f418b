"""Dormand-Prince 5(4) stepper with hooks for line fields.

Line fields have no orientation, so the right-hand side receives a
reference direction (the tangent at the start of the step) and returns the
representative closest to it.  After each accepted step an optional
projection maps the state back onto a constraint surface, and a stop
predicate can end the integration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import StepUnderflow

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


@dataclass
class RKResult:
    ys: list = field(default_factory=list)
    tangents: list = field(default_factory=list)
    ts: list = field(default_factory=list)
    reason: str = "max-length"


def integrate(rhs: Callable, y0, ref0, length: float, *, rtol: float = 1e-9, atol: float = 1e-9,
              h0: float = 1e-3, max_step: Callable | float | None = None,
              project: Callable | None = None, stop: Callable | None = None,
              min_step: float = 1e-14, max_steps: int = 100000,
              tol_scale: Callable | None = None) -> RKResult:
    """Integrate ``y' = rhs(y, ref)`` for ``t`` in [0, length].

    ``rhs`` returns ``(dy, tangent)``; ``tangent`` becomes the reference of
    the next step.  ``max_step`` may depend on the state.  ``stop(y)``
    returns a termination reason or None.  ``tol_scale(y)`` multiplies both
    tolerances, e.g. to keep the error small relative to a shrinking length.
    """
    y = np.asarray(y0, dtype=float).copy()
    ref = np.asarray(ref0, dtype=float)
    k0, ref = rhs(y, ref)
    out = RKResult(ys=[y.copy()], tangents=[np.asarray(ref).copy()], ts=[0.0])
    t, h = 0.0, h0
    for _ in range(max_steps):
        if t >= length:
            out.reason = "max-length"
            return out
        cap = max_step(y) if callable(max_step) else max_step
        if cap is not None:
            h = min(h, cap)
        h = min(h, length - t)
        if h < min_step:
            raise StepUnderflow(f"step size {h:.3e} below {min_step:.1e} at t={t:.6g}")
        ks = [k0]
        for i in range(1, 7):
            yi = y + h * sum(a * kk for a, kk in zip(_A[i], ks))
            ks.append(rhs(yi, ref)[0])
        y5 = y + h * sum(b * kk for b, kk in zip(_B5, ks))
        y4 = y + h * sum(b * kk for b, kk in zip(_B4, ks))
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        if tol_scale is not None:
            scale = scale * tol_scale(y)
        err = float(np.sqrt(np.mean(((y5 - y4) / scale) ** 2)))
        if err <= 1.0:
            t += h
            y = project(y5) if project is not None else y5
            k0, ref = rhs(y, ref)
            out.ys.append(y.copy())
            out.tangents.append(np.asarray(ref).copy())
            out.ts.append(t)
            if stop is not None:
                why = stop(y)
                if why:
                    out.reason = why
                    return out
            fac = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            fac = max(0.2, 0.9 * err ** -0.25)
        h *= fac
    out.reason = "max-steps"
    return out
