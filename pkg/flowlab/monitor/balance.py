"""
Overview:
    Monotonicity of ``theta = tau^((m - n) / 2) * int_N u ds`` along a curve moving by its curvature
    inside a moving ambient, with the exact balance

    .. math::

        \\frac{d\\theta}{dt} = \\underbrace{-\\tau^e \\int (k + df(\\nu))^2 u\\, ds}_{A}
            + \\underbrace{\\tau^e \\int (\\nabla^2 f(\\nu, \\nu) + Q(\\nu, \\nu) - 1/2\\tau) u\\, ds}_{B}
            + \\underbrace{\\tau^e \\int (K - \\mathrm{tr}\\, Q) u\\, ds}_{C}

    where ``f = -log u`` and ``e = (m - n) / 2``.
"""
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from ditk import logging
from hbutils.string import plural_word

from .harnack import lyh_trace_values
from .records import MonotonicityRecord
from ..flows.trajectory import FlowTrajectory, CurveTrajectory
from ..geometry import CurveState, curve_integral
from ..utils.error import ValidationError, GridMismatch, InsufficientSnapshots, NonpositiveTau, TimeOutOfRange
from ..utils.parallel import parallel_map


@dataclass(frozen=True, eq=False)
class RunBundle:
    """
    Ambient trajectory carrying ``u`` together with a curve trajectory recorded on its snapshot times.

    :param ambient: Ambient trajectory with a density at every snapshot.
    :param curves: Curve states, each time stamp matching one ambient snapshot.
    :param T: Reference time of ``tau``, the ambient configuration's ``T`` when omitted.
    :param m: Ambient dimension. (default: ``2``)
    :param n: Dimension of the moving submanifold. (default: ``1``)
    :raises GridMismatch: When a curve time is not an ambient snapshot time.
    """
    ambient: FlowTrajectory
    curves: CurveTrajectory
    T: Optional[float] = None
    m: int = 2
    n: int = 1

    def __post_init__(self):
        if not self.ambient.has_u:
            raise ValidationError('Run bundle needs a density u on the ambient trajectory.')
        if not self.m > self.n >= 1:
            raise ValidationError(f'Dimensions should satisfy m > n >= 1, but m={self.m!r} and n={self.n!r} given.')
        if self.T is None:
            object.__setattr__(self, 'T', float(self.ambient.config.T))
        try:
            indices = tuple(self.ambient.index_of(float(t)) for t in self.curves.times)
        except TimeOutOfRange as err:
            raise GridMismatch(f'Curve and ambient trajectories are not on a common time grid: {err}') from err
        object.__setattr__(self, '_indices', indices)

    def __len__(self):
        return len(self.curves)

    @property
    def times(self) -> np.ndarray:
        return self.curves.times

    def tau(self, t: float) -> float:
        return self.T - t

    def curve_at(self, index: int) -> CurveState:
        """
        Curve state ``index`` bound to the ambient metric of its time.
        """
        state = self.curves[index]
        if state.metric is None:
            state = state.with_metric(self.ambient.metric_at(state.t))
        return state

    def u_at(self, index: int):
        return self.ambient[self._indices[index]].u

    def index_of(self, t: float) -> int:
        times = self.times
        index = int(np.argmin(np.abs(times - t)))
        if abs(times[index] - t) > 1e-9 * max(1.0, abs(t)):
            raise TimeOutOfRange(f'No curve recorded at t={t!r}, nearest one at t={times[index]!r}.')
        return index


def _exponent(m: int, n: int) -> float:
    if not m > n >= 1:
        raise ValidationError(f'Dimensions should satisfy m > n >= 1, but m={m!r} and n={n!r} given.')
    return (m - n) / 2


def theta(bundle: RunBundle, t: float, m: Optional[int] = None, n: Optional[int] = None,
          T: Optional[float] = None) -> float:
    """
    Monitored quantity ``tau^((m - n) / 2) * int u ds`` at a recorded time.

    :param bundle: Run bundle.
    :type bundle: RunBundle
    :param t: Record time.
    :type t: float
    :param m: Ambient dimension, the bundle's own by default.
    :param n: Submanifold dimension, the bundle's own by default.
    :param T: Reference time, the bundle's own by default.
    :returns: Theta.
    :rtype: float
    :raises NonpositiveTau: When ``T - t <= 0``.

    Examples::
        >>> from flowlab.flows import exact_family, attach_exact_u, curve_flow_run
        >>> from flowlab.geometry import AnalyticBackground, CurveState
        >>> from flowlab.monitor import RunBundle, theta
        >>> from flowlab.tensorlab import families
        >>> traj = exact_family(AnalyticBackground('flat_plane'), (0.0, 0.01), n_snapshots=3, T=4.0, K_mode='zero')
        >>> traj = attach_exact_u(traj, families.constant_scalar, (1.0,))
        >>> bundle = RunBundle(traj, curve_flow_run(traj, CurveState.circle(1.0, 256)))
        >>> round(theta(bundle, 0.0) / (2 * 2 * 3.141592653589793), 6)  # sqrt(tau) * 2 pi r
        1.0
    """
    m = bundle.m if m is None else m
    n = bundle.n if n is None else n
    T = bundle.T if T is None else T
    tau = T - t
    if tau <= 0:
        raise NonpositiveTau(f'tau should be positive, but T - t = {tau!r} given.')
    index = bundle.index_of(t)
    curve = bundle.curve_at(index)
    u = bundle.u_at(index).density(curve.vertices)
    return tau ** _exponent(m, n) * curve_integral(curve, u)


def _record_terms(bundle: RunBundle, index: int) -> dict:
    curve = bundle.curve_at(index)
    field = bundle.u_at(index)
    config = bundle.ambient.config
    t = float(curve.t)
    tau = bundle.tau(t)
    if tau <= 0:
        raise NonpositiveTau(f'tau should be positive, but T - t = {tau!r} found at t={t!r}.')
    scale = tau ** _exponent(bundle.m, bundle.n)

    points = curve.vertices
    frame = curve.frame
    u = field.density(points)
    _, df, _ = field.potential_jet(points)
    normal_derivative = np.einsum('ni,ni->n', df, frame.normal)
    lyh = lyh_trace_values(field, curve.metric, points, frame.normal, tau, config.Q_mode)
    scalar = curve.metric.scalar_curvature(points)

    return dict(
        t=t, tau=tau,
        theta=scale * curve_integral(curve, u),
        termA=-scale * curve_integral(curve, (frame.k + normal_derivative) ** 2 * u),
        termB=scale * curve_integral(curve, lyh * u),
        termC=scale * curve_integral(curve, (config.k_sign - config.q_sign) * scalar * u),
        lyh_trace=lyh,
    )


def monotonicity_balance(bundle: RunBundle, T: Optional[float] = None) -> List[MonotonicityRecord]:
    """
    Balance of ``d theta / dt`` at every recorded time of the bundle.

    The derivative is a second-order difference over the record times (one-sided at both ends).
    Every term is a curve quadrature in the metric of its time, ``f = -log u`` and the normal
    derivatives are evaluated along the unit normal of the current metric.

    :param bundle: Run bundle with at least 3 records, ``m = 2`` and ``n = 1``.
    :type bundle: RunBundle
    :param T: Reference time, the bundle's own by default.
    :type T: Optional[float]
    :returns: One record per recorded time.
    :rtype: List[MonotonicityRecord]
    :raises InsufficientSnapshots: When less than 3 curve states are recorded.
    :raises NonpositiveTau: When ``T <= t`` at a recorded time.

    Examples::
        >>> import numpy as np
        >>> from flowlab.flows import sphere_family, attach_exact_u, curve_flow_run
        >>> from flowlab.geometry import CurveState
        >>> from flowlab.monitor import RunBundle, monotonicity_balance
        >>> from flowlab.tensorlab import families
        >>> traj = sphere_family(np.sqrt(2.0), 'ricci', (0.0, 0.2), n_snapshots=21)  # T = T_max = 1
        >>> traj = attach_exact_u(traj, families.soliton_density, (1.0, 1.0, 1.0))  # u = 1 / tau
        >>> bundle = RunBundle(traj, curve_flow_run(traj, CurveState.latitude(1.0, 256)))
        >>> records = monotonicity_balance(bundle)
        >>> max(abs(r.termB) + abs(r.termC) for r in records) < 1e-8
        True
    """
    if bundle.m != 2 or bundle.n != 1:
        raise ValidationError(f'Balance is only available for curves in surfaces, '
                              f'but m={bundle.m!r} and n={bundle.n!r} found.')
    if T is not None and T != bundle.T:
        bundle = RunBundle(bundle.ambient, bundle.curves, T, bundle.m, bundle.n)
    if len(bundle) < 3:
        raise InsufficientSnapshots(f'Balance needs at least 3 curve states, '
                                    f'but {plural_word(len(bundle), "state")} recorded.')

    rows = parallel_map(lambda i: _record_terms(bundle, i), range(len(bundle)))
    times = np.array([row['t'] for row in rows])
    thetas = np.array([row['theta'] for row in rows])
    derivatives = np.gradient(thetas, times, edge_order=2)

    records = []
    for row, derivative in zip(rows, derivatives):
        residual = float(derivative) - (row['termA'] + row['termB'] + row['termC'])
        records.append(MonotonicityRecord(
            t=row['t'], tau=row['tau'], theta=row['theta'], dtheta_dt=float(derivative),
            termA=row['termA'], termB=row['termB'], termC=row['termC'], residual=residual,
            lyh_trace=row['lyh_trace'],
        ))

    worst = max(record.relative_residual() for record in records)
    logging.info(f'Monotonicity balance evaluated on {plural_word(len(records), "record")}, '
                 f'worst relative residual {worst:.3g}.')
    return records
