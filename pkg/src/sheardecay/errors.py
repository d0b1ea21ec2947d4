"""Exception types shared across the package."""


class ShearDecayError(Exception):
    """Base class for all package errors."""


class OutOfDomainError(ShearDecayError):
    """A coordinate lies outside the profile domain or window."""


class OrderUnavailableError(ShearDecayError):
    """A derivative order above the profile's available maximum was requested."""


class EmptyGridError(ShearDecayError):
    """An evaluation grid with no points was supplied."""


class DegenerateProfileError(ShearDecayError):
    """The profile slope vanishes on a whole subinterval; no monotone split exists."""


class InvalidGridError(ShearDecayError):
    """Grid parameters are inconsistent (too few nodes, reversed endpoints)."""


class LengthMismatchError(ShearDecayError):
    """Vector length does not match the operator size."""


class ZeroVectorError(ShearDecayError):
    """A nonzero vector is required."""


class EdgeNotDecayedError(ShearDecayError):
    """The vector does not vanish at the truncation edges."""


class NoConvergenceError(ShearDecayError):
    """An iterative solver did not converge within its iteration budget."""


class WindowTooSmallError(ShearDecayError):
    """Too few checkpoints fall inside the requested fit window."""


class GridMismatchError(ShearDecayError):
    """Two results that must share a discretization were computed on different ones."""


class InvalidParamsError(ShearDecayError):
    """Scalar parameters violate their preconditions."""


class InsufficientRowsError(ShearDecayError):
    """Not enough usable rows for a regression."""


class FactorCheckFailedError(ShearDecayError):
    """A tensor factor fails its non-degeneracy checks."""


class GridTooLargeError(ShearDecayError):
    """The requested tensor grid exceeds the direct-evolution cap."""


class IoFailureError(ShearDecayError):
    """A report could not be written."""


class ConfigError(ShearDecayError):
    """The run configuration is missing or malformed."""
