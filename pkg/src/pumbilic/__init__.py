"""Partially umbilic points of hypersurfaces in R^4.

Classification of the partially umbilic curve of a Monge 4-jet, its
Lie-Cartan resolution, and tracing of the principal foliations and their
separatrices near the curve.
"""

from .classifier import PUClassification, PUKind, classify_point, continue_pu_curve
from .errors import PumbilicError
from .jet_model import GraphImmersion, MongeImmersion, MongeJet, ParametricImmersion
from .lie_cartan import LCState, find_singular_branches, lc_field, limit_spectrum
from .tracer import sector_census, trace_lc_orbit, trace_principal_line, trace_separatrix_family

__all__ = [
    "MongeJet", "MongeImmersion", "GraphImmersion", "ParametricImmersion",
    "PUKind", "PUClassification", "classify_point", "continue_pu_curve",
    "LCState", "lc_field", "find_singular_branches", "limit_spectrum",
    "trace_principal_line", "trace_lc_orbit", "trace_separatrix_family", "sector_census",
    "PumbilicError",
]
