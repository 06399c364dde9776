"""
Overview:
    Evolution identities along ambient trajectories: the flow equations of ``Ric``, ``R`` and the
    Christoffel symbols, and the heat-type equation satisfied by the Harnack tensor
    ``H = tau (Hess log u -+ Ric) + g / 2``.

    Time derivatives are second-order central differences over three consecutive snapshots. Spatial
    sides use the dual-number pipeline on closed-form trajectories and 4th-order stencils on torus grids.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .algebra import ricci_flow_rhs, ricci_from_riemann, trace, relative_residual, h_evolution_rhs_ricci, \
    h_evolution_rhs_backward
from .calculus import bind, christoffel_fn, riemann_fn, ricci_fn, scalar_fn, covariant_fn, covariant_tower, \
    laplacian_fn, batched
from .grid import GridGeometry, GridPoints, select_nodes, central_difference
from ..flows.trajectory import FlowTrajectory
from ..geometry import ConformalTorus, GridScalarField, AnalyticBackground
from ..utils.dual import jnp, to_numpy
from ..utils.error import ValidationError, InsufficientSnapshots, NonpositiveU

H_MODES = ('ricci', 'backward_ricci')


def default_probe_points(background: AnalyticBackground, n: int = 8, seed: int = 0) -> np.ndarray:
    """
    Deterministic chart points away from coordinate singularities.
    """
    rng = np.random.default_rng(seed)
    if background.kind == 'round_sphere':
        return np.stack([rng.uniform(0.4, np.pi - 0.4, n), rng.uniform(0.0, 2 * np.pi, n)], axis=-1)
    else:
        return rng.uniform(-1.0, 1.0, (n, 2))


def _bracket(traj: FlowTrajectory, t: Optional[float]) -> int:
    if len(traj) < 3:
        raise InsufficientSnapshots(f'Central differences need at least 3 snapshots, but {len(traj)} found.')
    index = len(traj) // 2 if t is None else traj.index_of(t)
    if not 0 < index < len(traj) - 1:
        raise InsufficientSnapshots(f'Snapshot at t={traj.times[index]!r} is not bracketed by neighbours.')
    return index


def _is_grid(traj: FlowTrajectory) -> bool:
    return traj.provenance == 'numeric' and isinstance(traj[0].metric, ConformalTorus)


@dataclass(frozen=True)
class FlowEvolutionResiduals:
    """
    Relative residuals of ``d_t Ric``, ``d_t R`` and ``d_t gamma`` against their flow equations.
    """
    ricci: float
    scalar: float
    christoffel: float

    @property
    def worst(self) -> float:
        return max(self.ricci, self.scalar, self.christoffel)


@lru_cache(maxsize=None)
def _flow_kernel(metric_family):
    def _pointwise(metric_params, sign, x, t):
        metric = bind(metric_family, metric_params)
        ginv = jnp.linalg.inv(metric(x, t))
        riem = riemann_fn(metric)(x, t)
        ric = ricci_from_riemann(ginv, riem, xp=jnp)
        dric = covariant_fn(metric, ricci_fn(metric), 2)(x, t)
        lap_ric = laplacian_fn(metric, ricci_fn(metric), 2)(x, t)
        lap_scalar = laplacian_fn(metric, scalar_fn(metric), 0)(x, t)
        rhs = ricci_flow_rhs(sign, ginv, riem, ric, dric, lap_ric, lap_scalar, xp=jnp)
        return (ric, trace(ginv, ric, xp=jnp), christoffel_fn(metric)(x, t)) + tuple(rhs)

    return batched(_pointwise)


def _analytic_flow_sides(traj: FlowTrajectory, index: int, points: np.ndarray):
    g = traj.background.as_metric_dim()
    kernel = _flow_kernel(g.family)
    sign = float(traj.config.q_sign)
    x = jnp.asarray(points)
    samples = [kernel(g.params, sign, x, float(traj.times[i]))[:3] for i in (index - 1, index, index + 1)]
    rhs = kernel(g.params, sign, x, float(traj.times[index]))[3:]
    times = traj.times[index - 1:index + 2]
    lhs = [central_difference(times, [to_numpy(s[k]) for s in samples]) for k in range(3)]
    return lhs, [to_numpy(r) for r in rhs]


def _grid_flow_sides(traj: FlowTrajectory, index: int, points: GridPoints):
    geometries = [GridGeometry(traj[i].metric) for i in (index - 1, index, index + 1)]
    times = traj.times[index - 1:index + 2]
    lhs = [
        central_difference(times, [geo.ric for geo in geometries]),
        central_difference(times, [geo.scalar for geo in geometries]),
        central_difference(times, [geo.gamma for geo in geometries]),
    ]
    geo = geometries[1]
    rhs = ricci_flow_rhs(traj.config.q_sign, geo.ginv, geo.riem, geo.ric, geo.covariant(geo.ric, 2),
                         geo.laplacian(geo.ric, 2), geo.laplacian(geo.scalar, 0))
    return [select_nodes(v, points) for v in lhs], [select_nodes(v, points) for v in rhs]


def check_flow_evolutions(traj: FlowTrajectory, p=None, t: Optional[float] = None) -> FlowEvolutionResiduals:
    """
    Compare the time derivatives of ``Ric``, ``R`` and ``gamma`` along a trajectory with
    ``sign * (Delta Ric + 2 R_ipjq Ric^pq - 2 Ric^2)``, ``sign * (Delta R + 2 |Ric|^2)`` and
    ``-sign * g^kl (nabla_i Ric_jl + nabla_j Ric_il - nabla_l Ric_ij)``, with ``g_t = -2 * sign * Ric``.

    :param traj: Ambient trajectory with at least three snapshots.
    :type traj: FlowTrajectory
    :param p: Probe points, chart points ``(N, 2)`` for closed-form trajectories and grid node indices
        ``[(i, j), ...]`` for torus runs. Deterministic chart points and every node respectively when omitted.
    :param t: Snapshot time with a neighbour on both sides, the middle snapshot when omitted.
    :type t: Optional[float]
    :returns: Relative residuals.
    :rtype: FlowEvolutionResiduals
    :raises InsufficientSnapshots: When ``t`` is not bracketed by snapshots.

    Examples::
        >>> import numpy as np
        >>> from flowlab.flows import sphere_family
        >>> from flowlab.tensorlab import check_flow_evolutions
        >>> traj = sphere_family(np.sqrt(2.0), 'ricci', (0.0, 0.5), n_snapshots=201)
        >>> check_flow_evolutions(traj).scalar < 1e-4
        True
    """
    index = _bracket(traj, t)
    if _is_grid(traj):
        lhs, rhs = _grid_flow_sides(traj, index, p)
    elif traj.provenance == 'exact':
        points = default_probe_points(traj.background) if p is None else np.atleast_2d(np.asarray(p, dtype=float))
        lhs, rhs = _analytic_flow_sides(traj, index, points)
    else:
        raise ValidationError('Flow evolutions are checked on torus runs and closed-form families only.')

    return FlowEvolutionResiduals(*(relative_residual(a, b) for a, b in zip(lhs, rhs)))


@dataclass(frozen=True)
class HEvolutionResult:
    """
    Both sides of the evolution of ``H`` at the probe points, and their relative residual.
    """
    mode: str
    lhs: np.ndarray
    rhs: np.ndarray
    residual: float


def _check_mode(traj: FlowTrajectory, mode: Optional[str]) -> str:
    mode = mode or traj.config.Q_mode
    if mode not in H_MODES:
        raise ValidationError(f'Harnack tensor mode should be one of {H_MODES!r}, but {mode!r} given.')
    if traj.config.Q_mode not in (mode, 'static'):
        raise ValidationError(f'Mode {mode!r} does not match a trajectory flowing by {traj.config.Q_mode!r}.')
    return mode


def _harnack_tensor_fn(metric, log_fn, T, mode: str):
    ric_fn = ricci_fn(metric)
    second = covariant_tower(metric, log_fn, 0, 2)[-1]
    flip = -1.0 if mode == 'ricci' else 1.0

    def _h(x, t):
        return (T - t) * (second(x, t) + flip * ric_fn(x, t)) + 0.5 * metric(x, t)

    return _h


def _log_fn(field_family, field_params, role: str):
    u = bind(field_family, field_params)

    def _log(x, t):
        value = u(x, t)
        return jnp.log(value) if role == 'u' else -value

    return _log


@lru_cache(maxsize=None)
def _h_value_kernel(metric_family, field_family, role: str, mode: str):
    def _pointwise(metric_params, field_params, T, x, t):
        metric = bind(metric_family, metric_params)
        return _harnack_tensor_fn(metric, _log_fn(field_family, field_params, role), T, mode)(x, t)

    return batched(_pointwise)


@lru_cache(maxsize=None)
def _h_sides_kernel(metric_family, field_family, role: str, mode: str):
    def _pointwise(metric_params, field_params, T, x, t):
        metric = bind(metric_family, metric_params)
        log_fn = _log_fn(field_family, field_params, role)
        h_fn = _harnack_tensor_fn(metric, log_fn, T, mode)
        g = metric(x, t)
        ginv = jnp.linalg.inv(g)
        riem = riemann_fn(metric)(x, t)
        ric = ricci_from_riemann(ginv, riem, xp=jnp)
        dl, ddl, dddl = (level(x, t) for level in covariant_tower(metric, log_fn, 0, 3))
        hess_scalar = covariant_tower(metric, scalar_fn(metric), 0, 2)[-1](x, t)
        if mode == 'ricci':
            ric_fn = ricci_fn(metric)
            rhs = h_evolution_rhs_ricci(
                T - t, g, ginv, riem, ric, covariant_fn(metric, ric_fn, 2)(x, t), laplacian_fn(metric, ric_fn, 2)(x, t),
                hess_scalar, h_fn(x, t), covariant_fn(metric, h_fn, 2)(x, t), dl, xp=jnp,
            )
        else:
            rhs = h_evolution_rhs_backward(T - t, g, ginv, riem, ric, hess_scalar, ddl, dddl, dl, xp=jnp)
        return laplacian_fn(metric, h_fn, 2)(x, t), rhs

    return batched(_pointwise)


def _analytic_h_sides(traj: FlowTrajectory, index: int, points: np.ndarray, mode: str):
    g = traj.background.as_metric_dim()
    T = float(traj.config.T)
    x = jnp.asarray(points)
    values = []
    for i in (index - 1, index, index + 1):
        u = traj[i].u
        if not hasattr(u, 'family'):
            raise ValidationError('Closed-form trajectories need a closed-form density.')
        u.log_jet(points)
        values.append(to_numpy(_h_value_kernel(g.family, u.family, u.role, mode)(g.params, u.params, T, x,
                                                                                  float(traj.times[i]))))
    u = traj[index].u
    lap_h, rhs = _h_sides_kernel(g.family, u.family, u.role, mode)(g.params, u.params, T, x,
                                                                  float(traj.times[index]))
    lhs = central_difference(traj.times[index - 1:index + 2], values) + to_numpy(lap_h)
    return lhs, to_numpy(rhs)


def _grid_log(torus: ConformalTorus, u) -> np.ndarray:
    if isinstance(u, GridScalarField):
        torus.check_same_grid(u.torus)
        return u.log_values
    x, y = torus.coordinates
    return u.log_jet(np.stack([x.ravel(), y.ravel()], axis=-1))[0].reshape(x.shape)


def _grid_h_sides(traj: FlowTrajectory, index: int, points: GridPoints, mode: str):
    flip = -1.0 if mode == 'ricci' else 1.0
    values = []
    for i in (index - 1, index, index + 1):
        geo = GridGeometry(traj[i].metric)
        ddl = geo.hessian(_grid_log(traj[i].metric, traj[i].u))
        values.append((traj.config.T - traj.times[i]) * (ddl + flip * geo.ric) + 0.5 * geo.g)

    geo = GridGeometry(traj[index].metric)
    tau = traj.config.T - traj.times[index]
    log_values = _grid_log(traj[index].metric, traj[index].u)
    dl, ddl, h = geo.partial(log_values), geo.hessian(log_values), values[1]
    hess_scalar = geo.hessian(geo.scalar)
    if mode == 'ricci':
        rhs = h_evolution_rhs_ricci(tau, geo.g, geo.ginv, geo.riem, geo.ric, geo.covariant(geo.ric, 2),
                                    geo.laplacian(geo.ric, 2), hess_scalar, h, geo.covariant(h, 2), dl)
    else:
        rhs = h_evolution_rhs_backward(tau, geo.g, geo.ginv, geo.riem, geo.ric, hess_scalar, ddl,
                                       geo.covariant(ddl, 2), dl)
    lhs = central_difference(traj.times[index - 1:index + 2], values) + geo.laplacian(h, 2)
    return select_nodes(lhs, points), select_nodes(rhs, points)


def check_H_evolution(traj: FlowTrajectory, p=None, t: Optional[float] = None,
                      mode: Optional[str] = None) -> HEvolutionResult:
    """
    Evaluate both sides of the evolution ``(d_t + Delta) H_ij`` of the Harnack tensor along a trajectory
    carrying a density ``u`` of the conjugate heat equation.

    With ``l = log u`` (i.e. ``l = -f``), mode ``ricci`` uses ``H = tau (Hess l - Ric) + g / 2`` and
    ``u_t = -Delta u + R u``, its right-hand side ends with Hamilton's matrix quadratic and the extra
    ``-Ric / tau`` term. Mode ``backward_ricci`` uses ``H = tau (Hess l + Ric) + g / 2`` and
    ``u_t = -Delta u - R u``, its right-hand side is written in terms of ``l``.

    :param traj: Trajectory with at least three snapshots and a density.
    :type traj: FlowTrajectory
    :param p: Probe points, as in :func:`check_flow_evolutions`.
    :param t: Snapshot time with a neighbour on both sides, the middle snapshot when omitted.
    :param mode: ``ricci`` or ``backward_ricci``, the trajectory's own direction when omitted.
        Static trajectories accept both.
    :returns: Both sides at the probe points, components last, and the relative residual.
    :rtype: HEvolutionResult
    :raises NonpositiveU: When ``u`` is not positive.
    :raises InsufficientSnapshots: When ``t`` is not bracketed by snapshots.
    """
    mode = _check_mode(traj, mode)
    if not traj.has_u:
        raise ValidationError('Harnack tensor evolution needs a density along the trajectory.')
    index = _bracket(traj, t)
    if _is_grid(traj):
        lhs, rhs = _grid_h_sides(traj, index, p, mode)
    elif traj.provenance == 'exact':
        points = default_probe_points(traj.background) if p is None else np.atleast_2d(np.asarray(p, dtype=float))
        lhs, rhs = _analytic_h_sides(traj, index, points, mode)
    else:
        raise ValidationError('Harnack tensor evolution is checked on torus runs and closed-form families only.')

    if not (np.all(np.isfinite(lhs)) and np.all(np.isfinite(rhs))):
        raise NonpositiveU('Harnack tensor is not finite, the density is not positive.')
    return HEvolutionResult(mode=mode, lhs=lhs, rhs=rhs, residual=relative_residual(lhs, rhs))
