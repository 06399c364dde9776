"""
Overview:
    Curve shortening flow ``x_t = k nu`` inside a moving ambient metric.

    Polylines are stepped explicitly and resampled uniformly in arclength after every step.
    Latitude circles of the round sphere family follow the exact reduction
    ``theta_t = -cot(theta) / rho(t)^2`` instead when asked to.
"""
import math
from typing import List, Optional, Tuple

import numpy as np
from ditk import logging
from hbutils.string import plural_word

from .trajectory import FlowTrajectory, CurveTrajectory
from ..config.defaults import CURVE_DT_FACTOR, COLLAPSE_FACTOR
from ..geometry import CurveState, curve_frame, resample_uniform
from ..utils.error import ValidationError, InvalidTimeOrdering, CurveCollapse
from ..utils.progress import with_progress


def _collapse_length(c: CurveState) -> float:
    # uniform edges of length L / n must stay above eps_edge
    return max(COLLAPSE_FACTOR, 2.0 * len(c)) * c.eps_edge


def _record_times(traj: FlowTrajectory, t_range: Optional[Tuple[float, float]]) -> np.ndarray:
    times = traj.times
    if t_range is None:
        return times
    t0, t1 = map(float, t_range)
    if not t0 < t1:
        raise InvalidTimeOrdering(f'Time range should be increasing, but {t_range!r} found.')
    tolerance = 1e-9 * max(1.0, abs(t0), abs(t1))
    selected = times[(times >= t0 - tolerance) & (times <= t1 + tolerance)]
    if selected.shape[0] < 2:
        raise ValidationError(f'Time range {t_range!r} holds less than 2 snapshots of the trajectory.')
    return selected


def _latitude_run(traj: FlowTrajectory, gamma0: CurveState, times: np.ndarray) -> CurveTrajectory:
    background = traj.background
    theta = float(gamma0.vertices[0, 0])
    n = len(gamma0)

    def _rate(value: float, t: float) -> float:
        return -math.cos(value) / math.sin(value) / background.radius_sq(t)

    states = [CurveState.latitude(theta, n, float(times[0]), traj.metric_at(float(times[0])))]
    for t_lo, t_hi in zip(times[:-1], times[1:]):
        n_sub = max(100, int(math.ceil((t_hi - t_lo) / 1e-4)))
        h = (t_hi - t_lo) / n_sub
        t = float(t_lo)
        for _ in range(n_sub):
            k1 = _rate(theta, t)
            k2 = _rate(theta + 0.5 * h * k1, t + 0.5 * h)
            k3 = _rate(theta + 0.5 * h * k2, t + 0.5 * h)
            k4 = _rate(theta + h * k3, t + h)
            theta += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
            t += h

        length = 2 * math.pi * math.sqrt(background.radius_sq(float(t_hi))) * math.sin(theta)
        if not 0 < theta < math.pi or length < _collapse_length(gamma0):
            return CurveTrajectory(tuple(states), collapse_time=float(t_hi))
        state = CurveState.latitude(theta, n, float(t_hi), traj.metric_at(float(t_hi)))
        states.append(CurveState(state.vertices, state.t, state.metric, state.closing_shift, gamma0.eps_edge))
    return CurveTrajectory(tuple(states))


def _polyline_run(traj: FlowTrajectory, gamma0: CurveState, times: np.ndarray, dt_factor: float,
                  silent: bool) -> CurveTrajectory:
    current = gamma0.with_vertices(gamma0.vertices, float(times[0]), traj.metric_at(float(times[0])))
    states: List[CurveState] = [current]
    n_steps = 0
    with with_progress(len(times) - 1, 'curve flow', silent=silent, unit='record') as pbar:
        for t_hi in times[1:]:
            t = current.t
            while t < t_hi - 1e-14:
                metric = current.metric
                frame = curve_frame(current, metric)
                min_edge = float(np.min(current.edge_lengths(metric)))
                step = min(dt_factor * min_edge ** 2, t_hi - t)
                vertices = current.vertices + step * frame.k[:, None] * frame.normal
                t = float(t_hi) if t_hi - (t + step) <= 1e-14 else t + step
                moved = current.with_vertices(vertices, t, traj.metric_at(t))
                try:
                    length = float(np.sum(moved.edge_lengths()))
                    if length < _collapse_length(current):
                        raise CurveCollapse(f'Curve length {length!r} fell below the collapse length '
                                            f'{_collapse_length(current)!r}.', t=t)
                    current = resample_uniform(moved)
                except CurveCollapse as err:
                    logging.debug(f'Curve flow stopped - {err}')
                    return CurveTrajectory(tuple(states), collapse_time=t)
                n_steps += 1
            states.append(current)
            pbar.update()

    logging.info(f'Curve flow finished with {plural_word(n_steps, "step")} and '
                 f'{plural_word(len(states), "record")}.')
    return CurveTrajectory(tuple(states))


def curve_flow_run(traj: FlowTrajectory, gamma0: CurveState, t_range: Optional[Tuple[float, float]] = None,
                   exact_reduction: bool = True, dt_factor: float = CURVE_DT_FACTOR,
                   silent: bool = True) -> CurveTrajectory:
    """
    Move ``gamma0`` by its geodesic curvature inside the ambient trajectory.

    :param traj: Ambient trajectory.
    :type traj: FlowTrajectory
    :param gamma0: Initial curve, placed at the first record time.
    :type gamma0: CurveState
    :param t_range: Time interval of the run, the whole trajectory when omitted. The curve is recorded
        at every snapshot time inside it.
    :param exact_reduction: Use the latitude reduction for latitude circles of the round sphere family.
        (default: ``True``)
    :type exact_reduction: bool
    :param dt_factor: Curve step bound ``dt <= dt_factor * (min edge length)^2``. (default: ``0.2``)
    :type dt_factor: float
    :param silent: Hide the progress bar. (default: ``True``)
    :returns: Curve states at the record times. When the total length drops below ``max(10, 2N) * eps_edge``
        the run stops and the states recorded so far are returned with ``collapse_time`` set.
    :rtype: CurveTrajectory
    :raises DegenerateCurve: When adjacent vertices come closer than ``eps_edge``.

    Examples::
        >>> import numpy as np
        >>> from flowlab.flows import exact_family, curve_flow_run
        >>> from flowlab.geometry import AnalyticBackground, CurveState
        >>> ambient = exact_family(AnalyticBackground('flat_plane'), (0.0, 0.2), n_snapshots=3, T=1.0)
        >>> curves = curve_flow_run(ambient, CurveState.circle(1.0, 128))
        >>> np.round(curves.lengths / (2 * np.pi), 3)  # sqrt(1 - 2t)
        array([1.   , 0.894, 0.775])
    """
    if not 0 < dt_factor <= CURVE_DT_FACTOR:
        raise ValidationError(f'Curve step factor should lie in (0, {CURVE_DT_FACTOR}], but {dt_factor!r} given.')
    times = _record_times(traj, t_range)
    if traj.provenance == 'exact' and traj.background.kind == 'round_sphere' \
            and exact_reduction and gamma0.is_latitude:
        result = _latitude_run(traj, gamma0, times)
    else:
        result = _polyline_run(traj, gamma0, times, dt_factor, silent)
    if result.collapsed:
        logging.warning(f'Curve collapsed at t={result.collapse_time!r} after '
                        f'{plural_word(len(result), "record")}.')
    return result
