"""Exception hierarchy shared across the package."""


class OrliczQhaError(Exception):
    """Base class for all package errors."""


class DegenerateFunction(OrliczQhaError):
    """A candidate Young function vanishes or is non-finite where it must not."""


class DimensionMismatch(OrliczQhaError):
    """List arguments whose lengths must agree do not."""


class ExponentOutOfRange(OrliczQhaError):
    """A characteristic exponent violates a required open range."""


class ConditionViolated(OrliczQhaError):
    """The feasibility condition for interpolation-weight selection fails."""


class InfeasibleTheta(OrliczQhaError):
    """An interpolation weight is too small for the requested construction."""


class NotAInc1(OrliczQhaError):
    """The slope test phi(s)/s <= phi(t)/t (s < t) fails on the grid."""


class ExponentOrderViolated(OrliczQhaError):
    """strong_type_bound requires p0 < q <= p < p1."""


class UnboundedNorm(OrliczQhaError):
    """The modular stays above 1 for every scale in the expanding bracket."""


class GridMismatch(OrliczQhaError):
    """Two grid functions live on different grids."""


class ZeroDilation(OrliczQhaError):
    """Dilation scale must be nonzero."""


class BoundaryDecayViolated(OrliczQhaError):
    """A grid function does not decay to tolerance at the domain boundary."""


class ConstraintViolated(OrliczQhaError):
    """A dilation spec violates one of its defining constraints."""
