from .error import FlowlabError, ValidationError, StabilityViolation, InvalidTimeOrdering, GridMismatch, \
    NonpositiveTau, EmptyReport, InsufficientSnapshots, TimeOutOfRange, NoncompactAmbient, NonpositiveU, \
    NonpositiveCurvature, SingularMetric, DegenerateCurve, NumericalFailure, BlowUp, Instability, PositivityLoss, \
    CurveCollapse, ReportIOError
from .parallel import get_thread_count, parallel_map
from .progress import with_progress
