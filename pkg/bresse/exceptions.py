# bresse/exceptions.py

from typing import Optional


class BresseError(Exception):
    """Base class for every error raised by the bresse package."""


class ParameterError(BresseError, ValueError):
    """Invalid physical or grid parameter."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class DimensionError(BresseError, ValueError):
    """Array lengths do not match the grid or each other."""


class SolverError(BresseError, RuntimeError):
    """A factorization, linear solve or eigensolve failed."""


class CoercivityError(SolverError):
    """The stiffness matrix is not positive definite."""


class NearSingularityError(SolverError):
    """i*lambda sits (numerically) on the spectrum of the generator."""

    def __init__(self, lam: float, message: Optional[str] = None):
        self.lam = lam
        super().__init__(message or f"resolvent is near-singular at lambda={lam!r}")


class DecayFitError(BresseError, ValueError):
    """The decay-rate fit window is unusable."""


class ConfigError(BresseError, ValueError):
    """Malformed, unknown or invalid run configuration entry."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"config field '{field}': {message}")


class ReportError(BresseError, ValueError):
    """A report file lacks the columns a reader or plot needs."""
