"""
Overview:
    Error hierarchy of flowlab.

    Input problems derive from :class:`ValidationError` (also a :class:`ValueError`), failures
    of a running computation derive from :class:`NumericalFailure` (also an :class:`ArithmeticError`)
    and carry the simulation time at which they were detected.
"""
from typing import Optional


class FlowlabError(Exception):
    """
    Base class of all the errors raised by flowlab.
    """
    pass


class ValidationError(FlowlabError, ValueError):
    """
    Invalid input, detected before any heavy computation starts.
    """
    pass


class StabilityViolation(ValidationError):
    pass


class InvalidTimeOrdering(ValidationError):
    pass


class GridMismatch(ValidationError):
    pass


class NonpositiveTau(ValidationError):
    pass


class EmptyReport(ValidationError):
    pass


class InsufficientSnapshots(ValidationError):
    pass


class TimeOutOfRange(ValidationError):
    pass


class NoncompactAmbient(ValidationError):
    pass


class NonpositiveU(ValidationError):
    pass


class NonpositiveCurvature(ValidationError):
    pass


class SingularMetric(ValidationError):
    pass


class DegenerateCurve(ValidationError):
    pass


class NumericalFailure(FlowlabError, ArithmeticError):
    """
    A running computation left its domain of validity at simulation time ``t``, when known.
    """

    def __init__(self, message: str, t: Optional[float] = None):
        FlowlabError.__init__(self, message)
        self.t = t

    def __str__(self):
        message = FlowlabError.__str__(self)
        if self.t is None:
            return message
        else:
            return f'{message} (t={self.t:.6g})'


class BlowUp(NumericalFailure):
    pass


class Instability(NumericalFailure):
    pass


class PositivityLoss(NumericalFailure):
    pass


class CurveCollapse(NumericalFailure):
    pass


class ReportIOError(FlowlabError, OSError):
    """
    A report could not be written to its destination.
    """
    pass
