"""Shared exception types."""


class SpecError(Exception):
    """A manifold description is invalid or degenerates at an evaluated point."""


class NotPositiveDefiniteError(SpecError):
    """Metric failed the positivity check at a point."""

    def __init__(self, message: str, smallest_pivot: float):
        super().__init__(message)
        self.smallest_pivot = smallest_pivot


class UnsupportedDerivativeError(SpecError):
    """A computation would need field derivatives beyond the jet order cap."""
