"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class AccuracyError(ArithmeticError):
    """A numerical scheme could not reach the requested accuracy.

    ``residual`` carries the best available error estimate, when known.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
