"""
Overview:
    Conjugate heat equation ``u_t = -Delta_g(t) u + K u`` along an ambient trajectory.

    The backward problem is integrated forward in ``tau = t1 - t`` from terminal data at the last
    snapshot, where it reads ``u_tau = Delta u - K u``.
"""
import math
from typing import Callable, Optional, Union

import numpy as np
from ditk import logging
from hbutils.string import plural_word

from .config import potential_sign
from .trajectory import FlowTrajectory
from ..config.defaults import TERMINAL_BUMP_AMPLITUDE, STABILITY_C
from ..geometry import ConformalTorus, GridScalarField, AnalyticScalarField, constant_field
from ..geometry.stencil import flat_laplacian
from ..utils.error import ValidationError, InsufficientSnapshots, PositivityLoss, NonpositiveU, \
    StabilityViolation, GridMismatch
from ..utils.progress import with_progress

TerminalData = Union[None, float, np.ndarray, GridScalarField, AnalyticScalarField, Callable]

_CONSTANT_CURVATURE_KINDS = {'flat_plane', 'flat_torus', 'round_sphere', 'gaussian_expander'}


def terminal_bump(torus: ConformalTorus, amplitude: float = TERMINAL_BUMP_AMPLITUDE) -> np.ndarray:
    """
    Default terminal data ``1 + a cos x``.
    """
    if not 0 <= amplitude < 1:
        raise ValidationError(f'Bump amplitude should lie in [0, 1), but {amplitude!r} given.')
    x, _ = torus.coordinates
    return 1 + amplitude * np.cos(x)


def _grid_terminal(torus: ConformalTorus, u_T: TerminalData) -> np.ndarray:
    if u_T is None:
        values = terminal_bump(torus)
    elif isinstance(u_T, GridScalarField):
        torus.check_same_grid(u_T.torus)
        values = np.asarray(u_T.values, dtype=float) if u_T.role == 'u' else np.exp(-u_T.values)
    elif isinstance(u_T, AnalyticScalarField):
        x, y = torus.coordinates
        values = u_T.density(np.stack([x.ravel(), y.ravel()], axis=-1)).reshape(x.shape)
    elif callable(u_T):
        x, y = torus.coordinates
        values = np.asarray(u_T(x, y), dtype=float) * np.ones_like(x)
    elif np.ndim(u_T) == 0:
        values = np.full(torus.phi.shape, float(u_T))
    else:
        values = np.asarray(u_T, dtype=float)
        if values.shape != torus.phi.shape:
            raise GridMismatch(f'Terminal data of shape {values.shape!r} is not sampled on grid '
                               f'{torus.phi.shape!r}.')
    if not np.all(np.isfinite(values)) or np.min(values) <= 0:
        raise NonpositiveU(f'Terminal data should be positive, minimum {np.min(values)!r} found.')
    return values


def _constant_terminal(u_T: TerminalData) -> float:
    if u_T is None:
        return 1.0
    elif isinstance(u_T, AnalyticScalarField):
        value = u_T.density(np.array([[0.3, 0.2], [1.1, 2.0], [2.5, 4.0]]))
        if np.ptp(value) > 1e-12 * max(1.0, float(np.max(np.abs(value)))):
            raise ValidationError('Closed-form ambients only accept spatially constant terminal data.')
        return float(value[0])
    elif np.ndim(u_T) == 0 and not callable(u_T):
        if float(u_T) <= 0:
            raise NonpositiveU(f'Terminal data should be positive, but {u_T!r} given.')
        return float(u_T)
    else:
        raise ValidationError(f'Closed-form ambients only accept spatially constant terminal data, '
                              f'but {type(u_T).__name__} given.')


def _substeps(span: float, dt: float) -> int:
    return max(1, int(math.ceil(span / dt - 1e-9)))


def _solve_grid(traj: FlowTrajectory, u_T: TerminalData, k_sign: int, dt: float, silent: bool):
    last = traj[-1].metric
    u = _grid_terminal(last, u_T)
    phis = [s.metric.phi for s in traj.snapshots]
    phi_min = min(float(np.min(phi)) for phi in phis)
    bound = STABILITY_C * last.h ** 2 * math.exp(2 * phi_min)
    if dt > bound:
        raise StabilityViolation(f'Heat step {dt!r} violates the stability bound '
                                 f'dt <= {STABILITY_C} * h^2 * exp(2 * min(phi)) = {bound!r}.')

    def _rate(values: np.ndarray, phi: np.ndarray) -> np.ndarray:
        weight = np.exp(-2 * phi)
        rate = weight * flat_laplacian(values, last.h_x, last.h_y, order=2)
        if k_sign != 0:
            scalar = -2 * weight * flat_laplacian(phi, last.h_x, last.h_y, order=2)
            rate = rate - k_sign * scalar * values
        return rate

    results = [None] * len(traj)
    results[-1] = u
    times = traj.times
    with with_progress(len(traj) - 1, 'conjugate heat', silent=silent, unit='snapshot') as pbar:
        for index in range(len(traj) - 1, 0, -1):
            t_hi, t_lo = times[index], times[index - 1]
            phi_hi, phi_lo = phis[index], phis[index - 1]
            n_sub = _substeps(t_hi - t_lo, dt)
            h = (t_hi - t_lo) / n_sub

            def _phi(t: float) -> np.ndarray:
                weight = (t - t_lo) / (t_hi - t_lo)
                return (1 - weight) * phi_lo + weight * phi_hi

            t = t_hi
            for _ in range(n_sub):
                k1 = _rate(u, _phi(t))
                k2 = _rate(u + 0.5 * h * k1, _phi(t - 0.5 * h))
                u = u + h * k2
                t -= h
                if not np.all(np.isfinite(u)) or np.min(u) <= 0:
                    raise PositivityLoss(f'Density reached {np.nanmin(u)!r}, the time step is too large.', t=t)
            results[index - 1] = u
            pbar.update()

    return [GridScalarField(s.metric, values) for s, values in zip(traj.snapshots, results)]


def _solve_constant(traj: FlowTrajectory, u_T: TerminalData, k_sign: int, dt: float):
    background = traj.background
    if background.kind not in _CONSTANT_CURVATURE_KINDS:
        raise ValidationError(f'Background {background.kind!r} has no spatially constant reduction.')
    u = _constant_terminal(u_T)

    def _rate(value: float, t: float) -> float:
        if background.kind == 'round_sphere':
            scalar = 2 / background.radius_sq(t)
        else:
            scalar = 0.0
        return -k_sign * scalar * value

    times = traj.times
    values = [0.0] * len(traj)
    values[-1] = u
    for index in range(len(traj) - 1, 0, -1):
        t_hi, t_lo = times[index], times[index - 1]
        n_sub = max(_substeps(t_hi - t_lo, dt), 50)
        h = (t_hi - t_lo) / n_sub
        t = t_hi
        for _ in range(n_sub):
            k1 = _rate(u, t)
            k2 = _rate(u + 0.5 * h * k1, t - 0.5 * h)
            k3 = _rate(u + 0.5 * h * k2, t - 0.5 * h)
            k4 = _rate(u + h * k3, t - h)
            u = u + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
            t -= h
        if not u > 0:
            raise PositivityLoss(f'Density reached {u!r}.', t=t_lo)
        values[index - 1] = u

    return [constant_field(value, t) for value, t in zip(values, times)]


def conjugate_heat_solve(traj: FlowTrajectory, u_T: TerminalData = None, K_mode: Optional[str] = None,
                         dt: Optional[float] = None, silent: bool = True) -> FlowTrajectory:
    """
    Solve the conjugate heat equation backward from terminal data at the last snapshot.

    :param traj: Ambient trajectory covering ``[t0, t1]``.
    :type traj: FlowTrajectory
    :param u_T: Terminal density at ``t1``: grid values, a scalar field, a callable ``(x, y)``
        or a constant, ``1 + 0.5 cos x`` on grids when omitted. Closed-form ambients accept
        spatially constant data only, integrated by the RK4 reduction ``u_tau = -K u``.
    :param K_mode: Potential mode, the trajectory's own ``K_mode`` when omitted.
    :type K_mode: Optional[str]
    :param dt: Time step of the explicit midpoint rule, the trajectory's ``dt`` when omitted.
    :type dt: Optional[float]
    :param silent: Hide the progress bar. (default: ``True``)
    :returns: The same trajectory carrying ``u`` at every snapshot.
    :rtype: FlowTrajectory
    :raises InsufficientSnapshots: When the trajectory holds a single snapshot.
    :raises NonpositiveU: When ``u_T`` is not positive.
    :raises PositivityLoss: When ``min u <= 0`` during the solve.

    Examples::
        >>> import numpy as np
        >>> from flowlab.flows import sphere_family, conjugate_heat_solve
        >>> traj = conjugate_heat_solve(sphere_family(np.sqrt(2.0), 'ricci', (0.0, 0.5), n_snapshots=11), 2.0)
        >>> traj[0].u.value(np.array([[1.0, 0.0]])), 2.0 * 0.5 / 1.0  # C / (T_max - t)
        (array([1.]), 1.0)
    """
    if len(traj) < 2:
        raise InsufficientSnapshots(f'Conjugate heat solve needs at least 2 snapshots, but {len(traj)} found.')
    k_sign = potential_sign(K_mode or traj.config.K_mode, traj.config.Q_mode)
    dt = dt or traj.config.dt
    if dt <= 0:
        raise ValidationError(f'Time step should be positive, but {dt!r} given.')

    if traj.provenance == 'exact':
        fields = _solve_constant(traj, u_T, k_sign, dt)
    else:
        fields = _solve_grid(traj, u_T, k_sign, dt, silent)
    logging.info(f'Conjugate heat equation solved on {plural_word(len(traj), "snapshot")}, '
                 f'K = {k_sign:+d} * R.')
    return traj.with_u(fields)


def attach_exact_u(traj: FlowTrajectory, family, params: tuple = (), role: str = 'u') -> FlowTrajectory:
    """
    Attach a closed-form solution ``family(params, x, t)`` of the conjugate heat equation to every snapshot.
    """
    return traj.with_u([AnalyticScalarField(family, tuple(params), float(t), role) for t in traj.times])
