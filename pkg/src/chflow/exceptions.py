"""Shared exception types."""


class BreakdownError(RuntimeError):
    """Raised when the flow map stops being a diffeomorphism.

    Carries the time, the label xi_star where the Jacobian floor was
    breached, and the offending Jacobian value.
    """

    def __init__(self, message, time=None, xi_star=None, min_y_xi=None):
        super().__init__(message)
        self.time = time
        self.xi_star = xi_star
        self.min_y_xi = min_y_xi


class NonFiniteError(ValueError):
    """Raised when NaN or Inf shows up in field or state data."""
