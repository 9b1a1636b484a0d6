"""Exception types shared across the package.

Caller bugs (shape mismatches, out-of-range parameters) raise ValueError;
the classes below signal geometric or numerical failure modes that callers
may want to catch and handle.
"""


class GeodesicError(Exception):
    """Base class for geometric/numerical failures."""


class NonUniqueGeodesic(GeodesicError):
    """The connecting geodesic is not unique (e.g. antipodal sphere points)."""


class DegenerateRetraction(GeodesicError):
    """Retraction argument leaves the retraction undefined (zero sum / rank loss)."""


class DegenerateInitialization(GeodesicError):
    """Waypoint initialization hit a degenerate ambient combination."""


class ShootingDidNotConverge(GeodesicError):
    """Single shooting failed; carries the residual-norm trace."""

    def __init__(self, message, residuals=None, iters=0):
        super().__init__(message)
        self.residuals = list(residuals) if residuals is not None else []
        self.iters = iters


class SingularJacobian(GeodesicError):
    """Dense block factorization hit a singular diagonal block."""


class KrylovDidNotConverge(GeodesicError):
    """Matrix-free linear solve stagnated; carries solver diagnostics."""

    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual
