"""Exception and warning types raised across the package."""


class PumbilicError(Exception):
    """Base class for all numeric and input errors of this package."""


class AllCubicsZero(UserWarning):
    """The cubic part in (u1, u2) vanishes, so the rotation angle is undefined."""


class ZeroCurvature(PumbilicError):
    pass


class RankDeficient(PumbilicError):
    pass


class NotPositiveDefinite(PumbilicError):
    pass


class DegeneratePlane(PumbilicError):
    pass


class AllCoefficientsZero(PumbilicError):
    pass


class BranchCountMismatch(PumbilicError):
    pass


class SpectralTolerance(PumbilicError):
    pass


class NewtonDiverged(PumbilicError):
    pass


class JacobianRankDrop(PumbilicError):
    pass


class SeedOnSingularSet(PumbilicError):
    pass


class StepUnderflow(PumbilicError):
    pass


class ProjectionFailed(PumbilicError):
    pass


class NotNormallyHyperbolic(PumbilicError):
    pass


class ParseError(PumbilicError):
    pass
