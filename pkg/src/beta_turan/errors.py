"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConvergenceError(ArithmeticError):
    """A series or iteration hit its hard cap before meeting its tolerance."""

    def __init__(self, message, *, estimate=None, detail=None):
        super().__init__(message)
        self.estimate = estimate
        self.detail = detail


class HypothesisError(DomainError):
    """Parameters violate the hypotheses under which a bound is proved."""
