"""
Exception hierarchy for the MTM lab.
Every numerical failure the lab can diagnose is raised as a LabError subclass;
the CLI maps them onto exit codes and the HTTP layer onto status codes.
"""

from typing import Optional


class LabError(Exception):
    """Base class for all diagnosable lab failures."""

    exit_code = 1

    def __init__(self, message: str, context: Optional[str] = None):
        self.context = context
        super().__init__(f"{context}: {message}" if context else message)


class DomainError(LabError):
    """Argument outside the domain of a formula (w=0, t<=|x|, ...)."""


class ContractViolation(LabError):
    """Caller broke a documented precondition (grid, CFL, lengths)."""


class ConfigurationError(LabError):
    """Invalid experiment configuration."""

    exit_code = 2

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(message, context=f"config field '{field}'" if field else None)


class InvalidDataError(LabError):
    """Scattering data violate positivity of 1 + w|r|^2 or similar."""


class ResonanceError(LabError):
    """a(w) vanishes (within tolerance) on the real axis."""


class ResolutionError(LabError):
    """Zero counting is inconsistent between contour refinements."""


class NonSimpleSpectrumError(LabError):
    """A zero of a(w) is not simple."""


class EigenvalueAccuracyError(LabError):
    """An eigenvalue candidate does not make the Jost columns proportional."""


class DegenerateSpectrumError(LabError):
    """Residue linear system is numerically singular at this (t, x)."""


class SmallNormError(LabError):
    """The singular integral equation failed to converge."""


class QuadratureError(LabError):
    """Two independent quadrature routes disagree beyond tolerance."""


class ToleranceFailure(LabError):
    """A verification run finished but missed a tolerance."""
