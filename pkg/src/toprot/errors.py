"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`ToprotError`.
Input-validation failures also derive from :class:`ValueError` so the CLI can
map them to exit status 2; numerical failures map to exit status 3.
"""


class ToprotError(Exception):
    """Base class for all package errors."""


class DomainError(ToprotError, ValueError):
    """An argument lies outside the domain of the operation."""


class OutOfDiagramError(DomainError):
    """(E, J) lies outside the accessible energy-momentum region AJ^2 <= E <= CJ^2."""


class UnsupportedRegimeError(DomainError):
    """The operation has no meaning on the separatrix (or in the given regime)."""


class DefinitionMismatchError(DomainError):
    """A rotation-number definition was requested outside its regime."""


class NumericalError(ToprotError, ArithmeticError):
    """A numerical procedure failed."""


class SingularityError(NumericalError):
    """A trajectory hit the coordinate singularity of the Euler-angle chart."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class NoTREDistanceError(NumericalError):
    """No separatrix distance with a 4*pi rotation number exists in the search range."""


class IncompleteLatticeError(DomainError):
    """A spectrum lattice is missing a j value inside its range."""


class UndefinedCellError(NumericalError):
    """A rotation-number cell lacks one of its three corner levels."""


class DegenerateCellError(NumericalError):
    """A rotation-number cell has a vanishing energy step in p."""
