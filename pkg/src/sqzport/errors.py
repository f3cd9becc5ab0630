"""Exceptions raised by the numerical engines."""


class NumericalError(RuntimeError):
    """Base class for numerical failures; carries the achieved residual."""

    def __init__(self, message, residual=None, module=None):
        super().__init__(message)
        self.residual = residual
        self.module = module


class CutoffError(NumericalError):
    """A Fock-space cutoff could not hold the requested probability mass."""


class ConvergenceError(NumericalError):
    """An iterative solver ran out of budget before reaching tolerance."""


class FirstOrderWarning(UserWarning):
    """The phase offset is large enough that first-order formulas are doubtful."""
