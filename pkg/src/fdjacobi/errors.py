"""Exception hierarchy for the solver.

Everything numeric raises a subclass of SolverError so the CLI can map any
pipeline failure to a single exit code.
"""


class SolverError(Exception):
    """Base class for all package errors."""


class PoleError(SolverError):
    """Gamma evaluated at zero or a negative integer."""


class PrecisionError(SolverError):
    """A value came out non-finite or a precision target was not met."""


class DomainError(SolverError):
    """Function argument outside the admissible domain."""


class SingularGapError(SolverError):
    """Two base eigenvalues are too close to divide by their gap."""


class DivergenceError(SolverError):
    """A-priori bounds requested although r_n >= 1."""


class QuadratureError(SolverError):
    """Quadrature oracle failed to reach its target tolerance."""


class ConfigError(SolverError):
    """Invalid job configuration."""


class FormatError(SolverError):
    """Malformed external data file."""


class SymmetryError(SolverError):
    """Supplied overlap data violates the scaled-symmetry identity."""


class IoError(SolverError):
    """Output file could not be written."""
