"""Exception hierarchy used across the package."""


class CasimirError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CasimirError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class ConvergenceError(CasimirError, ArithmeticError):
    """A sum or integral failed to reach the requested tolerance.

    Attributes
    ----------
    diagnostics : dict
        Whatever the failing routine knew at the time (terms used,
        partial value, offending index, ...).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class NonFiniteIntegrandError(CasimirError, ArithmeticError):
    """The integrand returned NaN (or inf) at some abscissa."""

    def __init__(self, abscissa):
        super().__init__(f"integrand is not finite at x = {abscissa!r}")
        self.abscissa = abscissa


class DegenerateCouplingError(CasimirError, ValueError):
    """The coupled oscillator system has a zero mode (D_j == 1) or is unstable."""
