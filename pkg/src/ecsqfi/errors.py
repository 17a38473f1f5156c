"""Exception hierarchy shared by the numerical modules and the CLI."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class NumericalError(ArithmeticError):
    """A computation could not reach the requested accuracy."""


class ConvergenceError(NumericalError):
    """An iterative solver hit its iteration cap."""


class CutoffError(NumericalError):
    """Fock-space truncation too small for the requested tail bound."""
