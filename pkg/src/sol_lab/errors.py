"""Exception types shared across the package."""


class SolLabError(Exception):
    """Base class for all package errors."""


class DomainError(SolLabError, ValueError):
    """An argument lies outside the domain of an operation."""


class UnsupportedMatrixError(DomainError):
    """The integer matrix cannot define a semidirect-product lattice."""


class DegenerateLatticeError(DomainError):
    """Generators do not span a three-dimensional lattice."""


class InvariantViolation(SolLabError, ArithmeticError):
    """An algebraic identity that must hold exactly has failed."""


class NoSolutionError(SolLabError, ValueError):
    """An equation has no real solution for the given data."""


class RepresentativeDegeneracyError(DomainError):
    """A coset representative sits at a singular height and must be shifted."""
