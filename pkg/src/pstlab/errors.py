"""Exception types shared across the package."""


class PstLabError(Exception):
    """Base class for all pstlab errors."""


class EigensolveError(PstLabError):
    """Eigendecomposition failed to converge or violated a solver guarantee."""


class ParityViolation(PstLabError):
    """An eigenvector is not a mirror eigenvector within tolerance, or the
    alternating sign pattern is broken."""


class MultiplierOverflow(PstLabError):
    """The gap structure is commensurate but needs an odd multiple beyond the
    configured cap; the spectrum is numerically indistinguishable from an
    incommensurate one at this precision."""


class NumericalBreakdown(PstLabError):
    """Lanczos off-diagonal underflow: the target spectrum is too close to
    degenerate for a double-precision reconstruction."""


class NotAdmissible(PstLabError):
    """The operation requires a chain that certifies as PST-admissible."""
