"""Exception hierarchy shared by every module of the package."""


class QBiorthoError(Exception):
    """Base class for all package errors."""


class ModeMismatch(QBiorthoError, TypeError):
    """Exact rationals were combined with floating point values."""


class PoleError(QBiorthoError, ZeroDivisionError):
    """A factor in a denominator (or a negative-index product) vanished."""


class DenominatorPole(PoleError):
    """A series denominator parameter vanishes before the series terminates."""


class NonConvergent(QBiorthoError, ValueError):
    """An infinite product or series was requested outside |q| < 1 or |z| < 1."""


class NonTerminating(NonConvergent):
    """A series has no terminating parameter and its argument is not < 1 in modulus."""


class DomainError(QBiorthoError, ValueError):
    """Inputs fall outside the range where a representation is valid."""


class InvalidParameters(QBiorthoError, ValueError):
    """A parameter set violates its documented invariants."""


class GridTooCoarse(QBiorthoError, RuntimeError):
    """Two quadrature resolutions disagree by more than the tolerance allows."""


class BudgetExceeded(QBiorthoError, RuntimeError):
    """A lattice would exceed the configured number of points."""


class TolNotReached(QBiorthoError, RuntimeError):
    """Adaptive quadrature could not meet the requested tolerance."""


class ConfigError(QBiorthoError, ValueError):
    """A campaign configuration file is malformed or incomplete."""
