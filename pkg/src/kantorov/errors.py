"""Exception types shared across the package."""

from __future__ import annotations


class KantorovError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(KantorovError):
    """An operator / run configuration is structurally invalid."""


class NumericError(KantorovError):
    """A numeric evaluation produced a non-finite value.

    Carries the offending point (if known) in ``point``.
    """

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point
