"""Registry of truncated series and their convergence against exact evaluation.

Each entry pairs a numerical quantity computed from the immersion with a
truncated Taylor series in the jet coefficients.  Along a ray ``u = h d``
the mismatch of a series truncated at order ``m`` is ``O(h^(m+1))``, so the
observed order is read off the slope of ``log|mismatch|`` against ``log h``.

Every entry is also compared with the exact expansion from
:mod:`pumbilic.series`, truncated at the same degree.  That comparison tests
the numerics independently of the hand-expanded series, and
:func:`coefficient_diff` locates the monomials where the two disagree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .fundamental_forms import compute_forms, oracle_forms, oracle_normal
from .jet_model import MongeImmersion, MongeJet
from .lie_cartan import cubic_coefficients, cubic_coefficients_oracle
from .principal_structure import k3_branch_oracle, plane_field, simple_curvature, uvw_oracle
from .poly import TruncPoly
from .restricted_forms import oracle_plane_slopes, oracle_restricted, restrict_forms
from .series import jet_series, truncated_value

__all__ = [
    "SeriesEntry",
    "EntryResult",
    "ENTRIES",
    "BY_NAME",
    "coefficient_diff",
    "random_jet",
    "observed_orders",
    "mismatches",
    "convergence_report",
]

_PAIRS = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]


@dataclass(frozen=True)
class SeriesEntry:
    name: str
    group: str
    order: int  # truncation order of the series
    exact: Callable  # (Sample) -> float
    series: Callable  # (jet, u) -> float

    @property
    def required(self) -> int:
        """Observed order demanded of the mismatch."""
        return 2 if self.order == 1 else 3


class _Sample:
    """Exact quantities at one point, computed once and shared by all entries."""

    def __init__(self, imm, u):
        self.forms = compute_forms(imm, u)
        self.k3 = simple_curvature(self.forms, imm.simple)
        self.plane = plane_field(self.forms, self.k3)
        self.restricted = restrict_forms(self.forms, self.plane)
        self._imm, self._u = imm, u
        self._cubic = None

    @property
    def cubic(self):
        if self._cubic is None:
            self._cubic = cubic_coefficients(self._imm, self._u)
        return self._cubic


def _forms_entries():
    out = []
    for i, j in _PAIRS:
        tag = f"{i + 1}{j + 1}"
        out.append(SeriesEntry(f"g{tag}", "metric", 3,
                               lambda s, i=i, j=j: s.forms.g[i, j],
                               lambda jet, u, i=i, j=j: oracle_forms(jet, u).g[i, j]))
    for i, j in _PAIRS:
        tag = f"{i + 1}{j + 1}"
        out.append(SeriesEntry(f"lambda{tag}", "second form", 2,
                               lambda s, i=i, j=j: s.forms.lam[i, j],
                               lambda jet, u, i=i, j=j: oracle_forms(jet, u).lam[i, j]))
    for i in range(4):
        out.append(SeriesEntry(f"n{i + 1}", "normal", 3,
                               lambda s, i=i: s.forms.N[i],
                               lambda jet, u, i=i: oracle_normal(jet, u)[i]))
    return out


def _plane_entries():
    out = [SeriesEntry("k3", "simple curvature", 2, lambda s: s.k3, k3_branch_oracle)]
    for i, nm in enumerate(("U1", "V1")):
        out.append(SeriesEntry(nm, "plane field", 2, lambda s, nm=nm: getattr(s.plane, nm),
                               lambda jet, u, i=i: uvw_oracle(jet, u)[i]))
    out.append(SeriesEntry("W1", "plane field", 1, lambda s: s.plane.W1,
                           lambda jet, u: uvw_oracle(jet, u)[2]))
    out.append(SeriesEntry("calU", "plane slopes", 2, lambda s: s.plane.calU,
                           lambda jet, u: oracle_plane_slopes(jet, u)[0]))
    out.append(SeriesEntry("calV", "plane slopes", 2, lambda s: s.plane.calV,
                           lambda jet, u: oracle_plane_slopes(jet, u)[1]))
    return out


def _restricted_entries():
    out = []
    for nm in ("Er", "Fr", "Gr", "er", "fr", "gr", "Lr", "Mr", "Nr"):
        out.append(SeriesEntry(nm, "restricted forms", 2,
                               lambda s, nm=nm: getattr(s.restricted, nm),
                               lambda jet, u, nm=nm: getattr(oracle_restricted(jet, u), nm)))
    for i, nm in enumerate(("A3", "A2", "A1", "A0")):
        out.append(SeriesEntry(nm, "cubic", 1, lambda s, i=i: s.cubic[i],
                               lambda jet, u, i=i: cubic_coefficients_oracle(jet, u)[i]))
    return out


ENTRIES: list[SeriesEntry] = _forms_entries() + _plane_entries() + _restricted_entries()
BY_NAME = {e.name: e for e in ENTRIES}


def random_jet(rng: np.random.Generator, coeff: float = 1.0, gap: float = 0.5) -> MongeJet:
    """A jet in adapted form with coefficients in [-coeff, coeff] and k3 - k >= gap."""
    vals = {n: rng.uniform(-coeff, coeff) for n in MongeJet.names()}
    k = rng.uniform(-1.0, 1.0)
    vals["k"], vals["k3"] = k, k + rng.uniform(gap, gap + 1.0)
    vals["d"] = 0.0  # adapted frames have no u1^2 u2 term
    return MongeJet(**vals)


def _unit(rng):
    d = rng.normal(size=3)
    return d / np.linalg.norm(d)


def _slope(hs, errs, floor, corrected: bool = False):
    """Least-squares order of ``errs`` against ``hs``.

    Steps whose mismatch sits at or below ``floor`` (roundoff) are dropped;
    None means fewer than two remain.  With ``corrected`` the fit is
    ``log e = p log h + q + r h``, absorbing the leading pre-asymptotic
    correction when at least four steps remain.
    """
    errs = np.asarray(errs, float)
    hs = np.asarray(hs, float)
    keep = errs > floor
    if keep.sum() < 2:
        return None
    e, h = np.log(errs[keep]), hs[keep]
    if corrected and keep.sum() >= 4:
        A = np.column_stack([np.log(h), np.ones_like(h), h])
        return float(np.linalg.lstsq(A, e, rcond=None)[0][0])
    return float(np.polyfit(np.log(h), e, 1)[0])


def mismatches(jet: MongeJet, direction, hs=(0.1, 0.05, 0.025), entries=None,
               reference: str = "printed") -> dict[str, tuple[list, float]]:
    """``{name: (errors at each h, magnitude)}`` along ``u = h * direction``.

    ``reference`` selects the truncation compared with the numerics: the
    hand-expanded series ("printed") or the exact expansion ("expansion").
    """
    entries = ENTRIES if entries is None else entries
    imm = MongeImmersion(jet)
    pts = [np.asarray(direction, float) * h for h in hs]
    exact = [(_Sample(imm, u), u) for u in pts]
    out = {}
    for e in entries:
        errs, mags = [], []
        for s, u in exact:
            val = float(np.real(e.exact(s)))
            ref = (float(e.series(jet, u)) if reference == "printed"
                   else truncated_value(jet, e.name, u, e.order))
            errs.append(abs(val - ref))
            mags.append(abs(val))
        out[e.name] = (errs, max(mags))
    return out


def observed_orders(jet: MongeJet, direction, hs=(0.1, 0.05, 0.025), entries=None,
                    reference: str = "printed") -> dict[str, float | None]:
    """Observed mismatch order of every entry along ``u = h * direction``."""
    return {name: _slope(hs, errs, 1e-13 * max(1.0, mag))
            for name, (errs, mag) in mismatches(jet, direction, hs, entries, reference).items()}


@dataclass
class EntryResult:
    name: str
    group: str
    required: int
    printed: list = field(default_factory=list)
    expansion: list = field(default_factory=list)

    @staticmethod
    def _median(xs):
        xs = [x for x in xs if x is not None]
        return float(np.median(xs)) if xs else float("inf")

    @property
    def printed_order(self) -> float:
        return self._median(self.printed)

    @property
    def expansion_order(self) -> float:
        return self._median(self.expansion)

    # three step sizes bias the slope by a few hundredths; compare at one decimal
    @property
    def passed(self) -> bool:
        return round(self.printed_order, 1) >= self.required

    @property
    def numerics_passed(self) -> bool:
        return round(self.expansion_order, 1) >= self.required


def convergence_report(n_jets: int = 200, seed: int = 0, hs=(0.1, 0.05, 0.025),
                       coeff: float = 1.0, entries=None,
                       references=("printed", "expansion")) -> list[EntryResult]:
    """Median observed orders over ``n_jets`` random jets, one random ray each."""
    entries = ENTRIES if entries is None else entries
    rng = np.random.default_rng(seed)
    res = {e.name: EntryResult(e.name, e.group, e.required) for e in entries}
    for _ in range(n_jets):
        jet = random_jet(rng, coeff)
        d = _unit(rng)
        for ref in references:
            for name, p in observed_orders(jet, d, hs, entries, ref).items():
                getattr(res[name], ref).append(p)
    return list(res.values())


def coefficient_diff(jet: MongeJet, name: str, rel_tol: float = 1e-9):
    """Monomials where the hand-expanded series of ``name`` departs from the expansion.

    Returns ``[(exponent, printed, expansion), ...]`` up to the truncation degree.
    """
    e = BY_NAME[name]
    U = [TruncPoly.variable(i, 3) for i in range(3)]
    printed = e.series(jet, U)
    exact = jet_series(jet, 3).get(name)
    out = []
    for m in np.ndindex(*exact.c.shape):
        if sum(m) > e.order:
            continue
        v = float(np.real(exact.c[m]))
        pv = float(np.real(printed.c[m])) if isinstance(printed, TruncPoly) else (
            float(printed) if m == (0, 0, 0) else 0.0)
        if abs(pv - v) > rel_tol * (1.0 + abs(v)):
            out.append((m, pv, v))
    return out
