"""
Exception hierarchy for the MAVE-BO toolkit.

Every error derives from MaveBoError; several also derive from the builtin
exception a caller would naturally catch (ValueError, OSError).
"""

from typing import Any, Optional


class MaveBoError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(MaveBoError, ValueError):
    """Array shapes or dimensions are inconsistent."""


class BandwidthTooSmallError(MaveBoError):
    """No point carries positive kernel weight for an anchor."""


class RankDeficiencyError(MaveBoError):
    """An unregularized least-squares system is singular."""


class InsufficientDataError(MaveBoError, ValueError):
    """Too few samples to fit the requested model."""


class IllConditionedError(MaveBoError):
    """A covariance matrix could not be factorized even after nugget escalation."""


class DiagnosticUndefinedError(MaveBoError, ValueError):
    """A diagnostic quantity is undefined for the given inputs."""


class ExperimentIOError(MaveBoError, OSError):
    """Results could not be written."""


class OptimizationAborted(MaveBoError):
    """
    A run stopped early.

    The partial trace collected up to the failure is kept on the exception.
    """

    def __init__(self, message: str, trace: Optional[Any] = None):
        super().__init__(message)
        self.trace = trace
