"""Exception hierarchy shared across the package."""

from __future__ import annotations


class TempusError(Exception):
    """Base class for all package errors."""


class ValidationError(TempusError):
    """Bad input data or configuration (CLI exit code 2)."""


class MissingArtifactError(ValidationError):
    """A pipeline stage was run before its input artifact exists."""

    def __init__(self, artifact: str, hint: str = ""):
        self.artifact = artifact
        msg = f"missing artifact: {artifact}"
        if hint:
            msg += f" ({hint})"
        super().__init__(msg)


class BackendError(TempusError):
    """Scoring backend unreachable or returned invalid data (CLI exit code 3)."""


class StatsError(ValidationError):
    """Invalid input to a statistical routine."""
