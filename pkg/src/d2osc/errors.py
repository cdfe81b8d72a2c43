"""Exception types shared across the package."""


class D2OscError(Exception):
    """Base class for all package errors."""


class NonFiniteValue(D2OscError):
    """A vector field or coupling function produced NaN or infinity."""


class NotEquilibrium(D2OscError):
    """A point claimed as an equilibrium has a non-negligible residual."""


class NotDiagonalized(D2OscError):
    """Conjugation by the character basis left off-diagonal mass behind.

    This signals a non-equivariant Jacobian (or a broken network)."""


class TableMismatch(D2OscError):
    """A listed symmetry generator moves a sampled point of its fixed set."""


class NotASolution(D2OscError):
    """The point passed to the classifier does not satisfy g = 0."""


class DegenerateEigenvalue(D2OscError):
    """An eigenvalue real part is too close to zero to call stability."""


class NotASaddleRegion(D2OscError):
    """Parameters violate the saddle conditions |eps| < min(a/2, b/2),
    |eps + 2q| < b/2."""


class DegenerateDenominator(D2OscError):
    """A contraction/expansion ratio has a vanishing denominator."""


class InvalidRates(D2OscError):
    """Saddle rate data with non-positive contraction or expansion rate."""


class NoConnection(D2OscError):
    """A shooting trajectory failed to reach any capture ball in time."""


class BrokenLoop(D2OscError):
    """The detected connections do not close into a single 4-cycle."""


class NoLap(D2OscError):
    """The trajectory completed fewer laps than requested within t_max."""
