"""Exception hierarchy shared by the library and the CLI."""


class PastvarError(Exception):
    """Base class for all errors raised by :mod:`pastvar`."""


class DomainError(PastvarError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class ConvergenceError(PastvarError, ArithmeticError):
    """A numerical routine did not reach its requested tolerance."""


class IntegrandError(PastvarError, ArithmeticError):
    """The integrand produced a non-finite value inside the interval.

    The offending abscissa is kept on ``x``.
    """

    def __init__(self, message, x):
        super().__init__(message)
        self.x = x


class SpecParseError(PastvarError, ValueError):
    """A distribution spec string could not be parsed."""
