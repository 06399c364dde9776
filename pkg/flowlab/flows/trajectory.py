"""
Overview:
    Immutable results of the flows: ambient trajectories with an optional density, and curve trajectories.
"""
import bisect
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .config import AmbientFlowConfig
from ..geometry import MetricField, ScalarField, AnalyticBackground, CurveState
from ..utils.error import ValidationError, InvalidTimeOrdering, TimeOutOfRange

PROVENANCES = ('numeric', 'exact')


@dataclass(frozen=True)
class Snapshot:
    t: float
    metric: MetricField
    u: Optional[ScalarField] = None


@dataclass(frozen=True, eq=False)
class FlowTrajectory:
    """
    Snapshots ``(t_i, g(t_i), u(t_i))`` of an ambient flow.

    :param snapshots: Snapshots with strictly increasing times.
    :param config: Configuration the trajectory was produced with.
    :param provenance: ``numeric`` for grid runs, ``exact`` for closed-form families.
    :param background: The closed-form family of an ``exact`` trajectory.
    """
    snapshots: Tuple[Snapshot, ...]
    config: AmbientFlowConfig
    provenance: str = 'numeric'
    background: Optional[AnalyticBackground] = None

    def __post_init__(self):
        snapshots = tuple(self.snapshots)
        object.__setattr__(self, 'snapshots', snapshots)
        if not snapshots:
            raise ValidationError('Trajectory needs at least one snapshot.')
        if self.provenance not in PROVENANCES:
            raise ValidationError(f'Unknown trajectory provenance - {self.provenance!r}.')
        if self.provenance == 'exact' and self.background is None:
            raise ValidationError('Exact trajectories should name their background.')
        times = np.array([s.t for s in snapshots])
        if np.any(np.diff(times) <= 0):
            raise InvalidTimeOrdering(f'Snapshot times should be strictly increasing, but {times.tolist()!r} found.')
        has_u = [s.u is not None for s in snapshots]
        if any(has_u) and not all(has_u):
            raise ValidationError('Density should be attached to every snapshot or to none.')

    def __len__(self):
        return len(self.snapshots)

    def __getitem__(self, item) -> Snapshot:
        return self.snapshots[item]

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    @property
    def has_u(self) -> bool:
        return self.snapshots[0].u is not None

    @property
    def is_compact(self) -> bool:
        return self.snapshots[0].metric.is_compact

    def index_of(self, t: float) -> int:
        """
        Index of the snapshot stored at time ``t``.

        :raises TimeOutOfRange: When no snapshot sits at ``t``.
        """
        times = self.times
        index = int(np.argmin(np.abs(times - t)))
        if abs(times[index] - t) > 1e-9 * max(1.0, abs(t)):
            raise TimeOutOfRange(f'No snapshot stored at t={t!r}, nearest one at t={times[index]!r}.')
        return index

    def metric_at(self, t: float) -> MetricField:
        """
        Ambient metric at any time of the covered interval, conformal factors linearly interpolated
        between the snapshots of numeric runs.
        """
        times = self.times
        if not times[0] - 1e-12 <= t <= times[-1] + 1e-12:
            raise TimeOutOfRange(f'Time {t!r} lies outside the trajectory [{times[0]!r}, {times[-1]!r}].')
        if self.provenance == 'exact':
            return self.background.at(t)

        index = min(max(bisect.bisect_right(times.tolist(), t) - 1, 0), len(times) - 1)
        lower = self.snapshots[index].metric
        if index == len(times) - 1 or abs(t - times[index]) <= 1e-12:
            return lower if lower.t == t else lower.with_phi(lower.phi, t)
        upper = self.snapshots[index + 1].metric
        weight = (t - times[index]) / (times[index + 1] - times[index])
        return lower.with_phi((1 - weight) * lower.phi + weight * upper.phi, t)

    def with_u(self, fields: Sequence[ScalarField]) -> 'FlowTrajectory':
        """
        The same trajectory carrying the density ``fields[i]`` at snapshot ``i``.
        """
        fields = list(fields)
        if len(fields) != len(self.snapshots):
            raise ValidationError(f'Expected {len(self.snapshots)} densities, but {len(fields)} given.')
        return FlowTrajectory(
            snapshots=tuple(Snapshot(s.t, s.metric, u) for s, u in zip(self.snapshots, fields)),
            config=self.config, provenance=self.provenance, background=self.background,
        )

    def select(self, indices: Sequence[int]) -> 'FlowTrajectory':
        return FlowTrajectory(tuple(self.snapshots[i] for i in indices), self.config, self.provenance,
                              self.background)


@dataclass(frozen=True, eq=False)
class CurveTrajectory:
    """
    Curve states at the record times of a curve flow, each bound to the ambient metric of its time.
    ``collapse_time`` is ``None`` when the run finished.
    """
    states: Tuple[CurveState, ...]
    collapse_time: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, 'states', tuple(self.states))
        if not self.states:
            raise ValidationError('Curve trajectory needs at least one state.')

    def __len__(self):
        return len(self.states)

    def __getitem__(self, item) -> CurveState:
        return self.states[item]

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def lengths(self) -> np.ndarray:
        return np.array([s.length for s in self.states])

    @property
    def collapsed(self) -> bool:
        return self.collapse_time is not None
