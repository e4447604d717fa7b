"""
Exception hierarchy for bernoulli_bounds.
"""

from typing import Optional


class BoundsError(Exception):
    """Base class for every error raised by the package."""


class DomainError(BoundsError, ValueError):
    """An argument lies outside the domain of the operation."""


class RegimeError(BoundsError, ValueError):
    """
    A bound was requested outside the regime where it is proven.

    ``condition`` names the violated condition (for example ``ascond2``) so
    the CLI can print it verbatim.
    """

    def __init__(self, message: str, condition: Optional[str] = None):
        super().__init__(message)
        self.condition = condition


class PlanningError(BoundsError):
    """A sample-size query cannot be answered for the requested family."""
