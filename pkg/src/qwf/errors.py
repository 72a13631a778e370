class QWFError(Exception):
    """Base class for numerical failures in this package."""


class WindowTooSmallError(QWFError):
    """The finite ring is too small: probability reached the boundary."""


class ConvergenceError(QWFError):
    """An iterative refinement did not converge."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class StepSizeError(QWFError):
    """ODE integration lost norm beyond tolerance; the step is too large."""
