"""Exception hierarchy. All derive from ``EPEError``."""


class EPEError(Exception):
    pass


class ValidationError(EPEError, ValueError):
    """Malformed input: non-Hermitian matrix, spectrum outside [-1, 1], bad size."""


class RegionError(EPEError, ValueError):
    """Region index out of range, overlap where disjointness is required."""


class NumericalError(EPEError, ArithmeticError):
    """A computed quantity violated a hard bound beyond roundoff."""


class DegeneracyError(NumericalError):
    """Ground state not unique at the requested filling."""
