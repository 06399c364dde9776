"""
Overview:
    Records produced by the monitor, one row of a report each.
"""
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

HARNACK_KINDS = ('lyh_trace', 'matrix_4_2', 'dim2')


@dataclass(frozen=True)
class MonotonicityRecord:
    """
    Monitored quantity ``theta = tau^((m - n) / 2) * int u ds`` at one record time, its numeric
    derivative and the three terms of its balance.

    ``lyh_trace`` holds the trace ``Hess f(nu, nu) + Q(nu, nu) - 1 / 2 tau`` at every vertex, the integrand of ``termB``.
    """
    t: float
    tau: float
    theta: float
    dtheta_dt: float
    termA: float
    termB: float
    termC: float
    residual: float
    lyh_trace: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def balance(self) -> float:
        return self.termA + self.termB + self.termC

    def relative_residual(self, eps: float = 1e-12) -> float:
        """
        ``|residual| / max(|termA| + |termB| + |termC|, eps)``.
        """
        return abs(self.residual) / max(abs(self.termA) + abs(self.termB) + abs(self.termC), eps)


@dataclass(frozen=True)
class HarnackSample:
    """
    Value of a Harnack quadratic of ``kind`` (``lyh_trace``, ``matrix_4_2`` or ``dim2``) at a chart point.
    ``direction`` is ``nu`` for the traces and ``V`` for the matrix form, whose transport ``U`` is kept too.
    """
    location: Tuple[float, float]
    t: float
    tau: float
    kind: str
    direction: Tuple[float, ...]
    value: float
    transport: Optional[Tuple[float, ...]] = None
