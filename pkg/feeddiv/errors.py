"""
Exception hierarchy. Each class carries the exit code the CLI returns for it.
"""
from __future__ import annotations

from typing import Any, Optional


class FeeddivError(Exception):
    """Base class for every error raised on purpose by this package."""

    exit_code: int = 1


# ---------- configuration / inputs ----------

class ConfigError(FeeddivError):
    exit_code = 2


class DeltaRangeError(ConfigError, ValueError):
    """δ outside [0, 1/T]."""

    def __init__(self, delta: float, n_types: int) -> None:
        super().__init__(f"delta={delta!r} must lie in [0, 1/T] = [0, {1.0 / n_types!r}]")
        self.delta = delta
        self.n_types = n_types


class InstanceError(FeeddivError, ValueError):
    exit_code = 2


class ShapeError(InstanceError):
    pass


class ProbabilityRangeError(InstanceError):
    pass


class InstanceFormatError(InstanceError):
    """Malformed instance / policy JSON."""


class PolicyError(InstanceError):
    def __init__(self, message: str, report: Any = None) -> None:
        super().__init__(message)
        self.report = report


class DegenerateInstanceError(InstanceError):
    pass


class ChallengerError(InstanceError):
    pass


# ---------- I/O ----------

class InputOutputError(FeeddivError):
    exit_code = 3


class IngestFormatError(InputOutputError, ValueError):
    def __init__(self, message: str, lines: Optional[list] = None) -> None:
        super().__init__(message)
        self.lines = lines or []


# ---------- solver ----------

class SolverError(FeeddivError):
    exit_code = 4


class IterationLimitError(SolverError):
    def __init__(self, cap: int) -> None:
        super().__init__(f"simplex iteration cap of {cap} exceeded")
        self.cap = cap


class InfeasibleProgramError(SolverError):
    pass


class NumericalError(SolverError):
    """Singular factorization, divergent series or a simplex result off its constraints."""

    def __init__(self, message: str, *, violation: Optional[float] = None) -> None:
        super().__init__(message)
        self.violation = violation


class FrontierError(SolverError):
    def __init__(self, delta: float, cause: Exception) -> None:
        super().__init__(f"frontier point delta={delta!r} failed: {cause}")
        self.delta = delta
        self.exit_code = getattr(cause, "exit_code", SolverError.exit_code)


# ---------- verification ----------

class VerificationError(FeeddivError):
    exit_code = 5
