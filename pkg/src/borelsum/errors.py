"""Exception types shared across the package.

The CLI maps these onto exit codes, so library code should raise the
most specific one that applies rather than a bare ValueError.
"""


class BorelsumError(Exception):
    """Base class for all package errors."""


class ConfigError(BorelsumError):
    """Malformed input data: bad JSON, inconsistent dimensions, bad flags."""


class DomainError(BorelsumError):
    """A point, direction or parameter lies outside the admissible region
    (outside a strip, inadmissible direction, spectrum too close to the
    integration lines, resonant eigenvalue configuration, ...)."""


class ConvergenceError(BorelsumError):
    """An iteration or quadrature failed to reach the requested tolerance."""
