"""
Overview:
    Configuration of the coupled ambient evolution ``g_t = -2Q``, ``u_t = -Delta u + K u``.
"""
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..config.defaults import STABILITY_C, TAU_MIN
from ..geometry.background import FLOW_DIRECTIONS, direction_sign
from ..utils.error import ValidationError, InvalidTimeOrdering, NonpositiveTau, StabilityViolation

K_MODES = ('scalar_curvature', 'trace_Q', 'zero')


def potential_sign(K_mode: str, Q_mode: str) -> int:
    """
    Sign ``s`` of ``K = s * R`` in two dimensions.

    ``scalar_curvature`` follows the conjugate equation of the ambient flow, i.e. ``+R`` for Ricci
    flow and static metrics and ``-R`` for backward Ricci flow. ``trace_Q`` is ``tr Q = sign * R``
    with ``Q = sign * Ric``.
    """
    if K_mode == 'scalar_curvature':
        return -1 if Q_mode == 'backward_ricci' else 1
    elif K_mode == 'trace_Q':
        return direction_sign(Q_mode)
    elif K_mode == 'zero':
        return 0
    else:
        raise ValidationError(f'Unknown potential mode - {K_mode!r}.')


@dataclass(frozen=True)
class AmbientFlowConfig:
    """
    Ambient flow setup.

    :param Q_mode: One of ``ricci``, ``backward_ricci`` or ``static``, giving ``Q = Ric``, ``-Ric`` or ``0``.
    :param K_mode: One of ``scalar_curvature``, ``trace_Q`` or ``zero``.
    :param T: Reference time of ``tau = T - t``.
    :param t_range: Time interval ``(t0, t1)`` of the run, ``t1 < T`` strictly.
    :param dt: Time step.
    :param snapshot_stride: Keep one snapshot every ``snapshot_stride`` steps.
    :param tau_min: Smallest admissible ``tau`` along the run.
    """
    Q_mode: str = 'ricci'
    K_mode: str = 'trace_Q'
    T: float = 1.0
    t_range: Tuple[float, float] = (0.0, 0.5)
    dt: float = 1e-4
    snapshot_stride: int = 1
    tau_min: float = TAU_MIN

    def __post_init__(self):
        direction_sign(self.Q_mode)
        potential_sign(self.K_mode, self.Q_mode)
        t0, t1 = map(float, self.t_range)
        object.__setattr__(self, 't_range', (t0, t1))
        if not t0 < t1:
            raise InvalidTimeOrdering(f'Time range should be increasing, but {self.t_range!r} found.')
        if not self.T - t1 >= self.tau_min:
            raise NonpositiveTau(f'Run should end before T - tau_min = {self.T - self.tau_min!r}, '
                                 f'but t1 = {t1!r} found.')
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValidationError(f'Time step should be positive, but {self.dt!r} found.')
        if self.snapshot_stride < 1:
            raise ValidationError(f'Snapshot stride should be at least 1, but {self.snapshot_stride!r} found.')

    @property
    def q_sign(self) -> int:
        return direction_sign(self.Q_mode)

    @property
    def k_sign(self) -> int:
        return potential_sign(self.K_mode, self.Q_mode)

    def tau(self, t):
        return self.T - np.asarray(t, dtype=float)

    @property
    def n_steps(self) -> int:
        t0, t1 = self.t_range
        return max(1, int(math.ceil((t1 - t0) / self.dt - 1e-9)))

    @property
    def effective_dt(self) -> float:
        t0, t1 = self.t_range
        return (t1 - t0) / self.n_steps

    def stability_bound(self, h: float, phi_min: float) -> float:
        return STABILITY_C * h ** 2 * math.exp(2 * phi_min)

    def check_stability(self, h: float, phi_min: float):
        """
        Check the explicit bound ``dt <= c * h^2 * exp(2 * min(phi))``.

        :raises StabilityViolation: When the bound is violated.
        """
        bound = self.stability_bound(h, phi_min)
        if self.dt > bound:
            raise StabilityViolation(f'Time step {self.dt!r} violates the stability bound '
                                     f'dt <= {STABILITY_C} * h^2 * exp(2 * min(phi)) = {bound!r}.')

    def with_(self, **kwargs) -> 'AmbientFlowConfig':
        values = dict(Q_mode=self.Q_mode, K_mode=self.K_mode, T=self.T, t_range=self.t_range, dt=self.dt,
                      snapshot_stride=self.snapshot_stride, tau_min=self.tau_min)
        values.update(kwargs)
        return AmbientFlowConfig(**values)
