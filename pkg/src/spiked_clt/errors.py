"""Exception hierarchy shared across the package."""


class SpikedCLTError(Exception):
    """Base class for all errors raised by spiked_clt."""


class DomainError(SpikedCLTError, ValueError):
    """Inputs outside the region where a formula or statistic is defined."""

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class CriticalRegimeError(DomainError):
    """Spike sits on the detachment threshold; the mean correction is undefined there."""


class UnsupportedStatisticError(SpikedCLTError, ValueError):
    pass


class NumericalError(SpikedCLTError, ArithmeticError):
    """A numerical procedure failed to reach its accuracy target."""


class AnalyticityError(NumericalError):
    """Chebyshev coefficients did not decay: the statistic is too rough near the support."""
