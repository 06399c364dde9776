"""
Overview:
    Harnack-type quadratics: the soliton trace terms, the Li-Yau-Hamilton trace along curves, Hamilton's
    matrix quadratic and its two-dimensional special form.

    The matrix and the 2D forms accept a closed-form metric (dual-number oracle), a background
    snapshot, or a conformal torus probed at grid nodes (4th-order stencils).
"""
from functools import lru_cache
from typing import Optional, Union

import jax
import numpy as np

from ..geometry import MetricField, ScalarField, CurveState, ConformalTorus, BackgroundSnapshot, \
    direction_sign
from ..tensorlab.algebra import ricci_from_riemann, harnack_quadratic
from ..tensorlab.calculus import bind, riemann_fn, ricci_fn, scalar_fn, covariant_fn, covariant_tower, batched
from ..tensorlab.grid import GridGeometry, select_nodes
from ..tensorlab.metric import AnalyticMetricDim, as_points, squeeze_single
from ..utils.dual import jnp, to_numpy
from ..utils.error import ValidationError, InvalidTimeOrdering, NonpositiveTau, NonpositiveCurvature

SOLITON_KINDS = ('expanding', 'steady', 'shrinking')

State = Union[AnalyticMetricDim, BackgroundSnapshot, ConformalTorus]


def _check_tau(tau):
    if np.any(np.asarray(tau) <= 0):
        raise NonpositiveTau(f'tau should be positive, but {tau!r} given.')


def soliton_trace_term(kind: str, m: int, n: int, t: float, T: float, T_ext: Optional[float] = None) -> float:
    """
    Trace term ``(m - n) / 2 * (1 / (T_ext - t) - 1 / (T - t))`` contributed by a gradient soliton to the
    monotonicity of ``tau^((m - n) / 2) * int u``, with ``T_ext = T_min`` (expanding) or ``T_max``
    (shrinking), and ``-(m - n) / 2 / (T - t)`` for a steady soliton.

    :param kind: ``expanding``, ``steady`` or ``shrinking``.
    :type kind: str
    :param m: Ambient dimension.
    :type m: int
    :param n: Submanifold dimension, ``m > n``.
    :type n: int
    :param t: Time.
    :type t: float
    :param T: Reference time of ``tau``.
    :type T: float
    :param T_ext: Extremal time of the soliton, unused for steady solitons.
    :type T_ext: Optional[float]
    :returns: The trace term. Negative for expanding and steady solitons, nonpositive for shrinking ones
        whenever ``T <= T_max``.
    :rtype: float
    :raises InvalidTimeOrdering: Unless ``T_min < t < T`` (expanding), ``t < T`` (steady) or
        ``t < min(T, T_max)`` (shrinking).

    Examples::
        >>> from flowlab.monitor import soliton_trace_term
        >>> soliton_trace_term('steady', 3, 1, 0.0, 2.0)
        -0.5
        >>> soliton_trace_term('expanding', 2, 1, 1.0, 2.0, 0.0)
        -1.0
        >>> soliton_trace_term('shrinking', 2, 1, 0.3, 1.0, 1.0)
        0.0
    """
    if kind not in SOLITON_KINDS:
        raise ValidationError(f'Unknown soliton kind - {kind!r}.')
    if not m > n >= 1:
        raise ValidationError(f'Dimensions should satisfy m > n >= 1, but m={m!r} and n={n!r} given.')
    factor = (m - n) / 2

    if kind == 'steady':
        if not t < T:
            raise InvalidTimeOrdering(f'Steady soliton needs t < T, but t={t!r} and T={T!r} given.')
        return -factor / (T - t)

    if T_ext is None:
        raise ValidationError(f'{kind.capitalize()} soliton needs its extremal time.')
    if kind == 'expanding':
        if not T_ext < t < T:
            raise InvalidTimeOrdering(f'Expanding soliton needs T_min < t < T, '
                                      f'but T_min={T_ext!r}, t={t!r} and T={T!r} given.')
    else:
        if not t < min(T, T_ext):
            raise InvalidTimeOrdering(f'Shrinking soliton needs t < min(T, T_max), '
                                      f'but t={t!r}, T={T!r} and T_max={T_ext!r} given.')
    if T == T_ext:
        return 0.0
    return factor * (1 / (T_ext - t) - 1 / (T - t))


def lyh_trace_values(field: ScalarField, metric: MetricField, points: np.ndarray, normals: np.ndarray, tau: float,
                     Q_mode: str) -> np.ndarray:
    """
    ``Hess f(nu, nu) + sign * Ric(nu, nu) - 1 / 2 tau`` at chart points with unit normals, ``f = -log u``.
    """
    _check_tau(tau)
    sign = direction_sign(Q_mode)
    _, df, ddf = field.potential_jet(points)
    gamma = metric.christoffel(points)
    hessian = ddf - np.einsum('nkij,nk->nij', gamma, df)
    hess_nn = np.einsum('nij,ni,nj->n', hessian, normals, normals)
    g_nn = np.einsum('nij,ni,nj->n', metric.metric_tensor(points), normals, normals)
    ric_nn = 0.5 * metric.scalar_curvature(points) * g_nn
    return hess_nn + sign * ric_nn - 1 / (2 * tau)


def harnack_trace(field: ScalarField, curve: CurveState, index: int, tau: float, Q_mode: str) -> float:
    """
    Li-Yau-Hamilton trace ``Hess f(nu, nu) +- Ric(nu, nu) - 1 / 2 tau`` at one vertex of a curve,
    ``+`` under Ricci flow and ``-`` under backward Ricci flow.

    :param field: Density ``u`` or potential ``f``.
    :type field: ScalarField
    :param curve: Curve bound to the ambient metric.
    :type curve: CurveState
    :param index: Vertex index.
    :type index: int
    :param tau: ``T - t``.
    :type tau: float
    :param Q_mode: ``ricci``, ``backward_ricci`` or ``static``.
    :type Q_mode: str
    :returns: The trace.
    :rtype: float
    :raises NonpositiveTau: When ``tau <= 0``.

    Examples::
        >>> from flowlab.geometry import AnalyticBackground, CurveState, constant_field
        >>> from flowlab.monitor import harnack_trace
        >>> flat = AnalyticBackground('flat_plane').at(0.0)
        >>> harnack_trace(constant_field(0.0, role='f'), CurveState.circle(1.0, 64, metric=flat), 0, 2.0, 'static')
        -0.25
    """
    return float(harnack_trace_along(field, curve, tau, Q_mode)[index])


def harnack_trace_along(field: ScalarField, curve: CurveState, tau: float, Q_mode: str) -> np.ndarray:
    """
    :func:`harnack_trace` at every vertex of ``curve``.
    """
    frame = curve.frame
    return lyh_trace_values(field, curve.metric, curve.vertices, frame.normal, tau, Q_mode)


@lru_cache(maxsize=None)
def _matrix_kernel(metric_family):
    def _pointwise(metric_params, tau, v, u, x, t):
        metric = bind(metric_family, metric_params)
        ginv = jnp.linalg.inv(metric(x, t))
        riem = riemann_fn(metric)(x, t)
        ric = ricci_from_riemann(ginv, riem, xp=jnp)
        dric = covariant_fn(metric, ricci_fn(metric), 2)(x, t)
        hess_scalar = covariant_tower(metric, scalar_fn(metric), 0, 2)[-1](x, t)
        return harnack_quadratic(tau, ginv, ric, dric, riem, hess_scalar, v, u, xp=jnp)

    def _wrapped(metric_params, tau, v, u, x, t):
        return jax.vmap(_pointwise, in_axes=(None, None, 0, 0, 0, None))(metric_params, tau, v, u, x, t)

    return jax.jit(_wrapped)


@lru_cache(maxsize=None)
def _log_scalar_kernel(metric_family):
    def _pointwise(metric_params, x, t):
        metric = bind(metric_family, metric_params)
        scalar = scalar_fn(metric)

        def _log_scalar(y, s):
            return jnp.log(scalar(y, s))

        return scalar(x, t), covariant_tower(metric, _log_scalar, 0, 2)[-1](x, t)

    return batched(_pointwise)


def _analytic(state) -> tuple:
    if isinstance(state, AnalyticMetricDim):
        return state, 0.0
    elif isinstance(state, BackgroundSnapshot):
        return state.background.as_metric_dim(), float(state.time)
    else:
        raise ValidationError(f'Unsupported ambient state - {type(state).__name__}.')


def _directions(values, n: int, dim: int) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    return np.broadcast_to(values, (n, dim)) if values.ndim == 1 else values


def harnack_matrix(state: State, p, V, U, tau, t: Optional[float] = None):
    """
    Hamilton's matrix quadratic
    ``(Hess R + 2 Ric^2 + Ric / tau - 2 nabla_k Ric U^k + 2 R_ipjq U^p U^q)(V, V)``. No sign is assumed.

    :param state: Closed-form metric, background snapshot or conformal torus.
    :param p: Chart points ``(N, dim)`` or a single point, grid node indices ``[(i, j), ...]`` on a torus.
    :param V: Direction, one vector or one per point.
    :param U: Transport vector, one vector or one per point.
    :param tau: ``T - t``.
    :param t: Time of a closed-form metric family, the snapshot time by default.
    :returns: The quadratic, a float for a single point.
    :raises NonpositiveTau: When ``tau <= 0``.

    Examples::
        >>> import numpy as np
        >>> from flowlab.geometry import AnalyticBackground
        >>> from flowlab.monitor import harnack_matrix
        >>> sphere = AnalyticBackground('round_sphere', rho0=1.0).at(0.0)  # R = 2
        >>> theta = 1.0
        >>> v, u = np.array([1.0, 0.0]), np.array([0.0, 1 / np.sin(theta)])
        >>> harnack_matrix(sphere, np.array([theta, 0.3]), v, u, tau=0.5)  # R^2 / 2 + R / 2 tau + R
        6.0...
    """
    _check_tau(tau)
    if isinstance(state, ConformalTorus):
        geo = GridGeometry(state)
        nodes = np.asarray(p, dtype=int).reshape(-1, 2)
        ginv, ric, riem = (select_nodes(a, nodes) for a in (geo.ginv, geo.ric, geo.riem))
        dric = select_nodes(geo.covariant(geo.ric, 2), nodes)
        hess_scalar = select_nodes(geo.hessian(geo.scalar), nodes)
        values = harnack_quadratic(tau, ginv, ric, dric, riem, hess_scalar,
                                   _directions(V, len(nodes), 2), _directions(U, len(nodes), 2))
        return float(values[0]) if np.asarray(p).ndim == 1 else values

    g, default_t = _analytic(state)
    points = as_points(p, g.dim)
    g.check_positive(points, default_t if t is None else t)
    values = _matrix_kernel(g.family)(g.params, float(tau), jnp.asarray(_directions(V, len(points), g.dim)),
                                      jnp.asarray(_directions(U, len(points), g.dim)), jnp.asarray(points),
                                      default_t if t is None else t)
    values = squeeze_single(values, p)
    return float(values) if np.ndim(values) == 0 else values


def dim2_harnack(state: State, p, nu, tau, t: Optional[float] = None):
    """
    Two-dimensional Harnack form ``Hess log R(nu, nu) + R / 2 + 1 / 2 tau``.

    :param state: Closed-form metric, background snapshot or conformal torus.
    :param p: Chart points or grid node indices, as in :func:`harnack_matrix`.
    :param nu: Unit direction, one vector or one per point.
    :param tau: ``T - t``.
    :param t: Time of a closed-form metric family, the snapshot time by default.
    :returns: The form, a float for a single point.
    :raises NonpositiveCurvature: When ``R <= 0`` at a probed point.
    :raises NonpositiveTau: When ``tau <= 0``.

    Examples::
        >>> import numpy as np
        >>> from flowlab.geometry import AnalyticBackground
        >>> from flowlab.monitor import dim2_harnack
        >>> cigar = AnalyticBackground('cigar').at(0.0)  # R(0) = 4, Hess log R(0) = -2 g
        >>> dim2_harnack(cigar, np.array([0.0, 0.0]), np.array([1.0, 0.0]), tau=1.0)
        0.5...
    """
    _check_tau(tau)
    if isinstance(state, ConformalTorus):
        geo = GridGeometry(state)
        nodes = np.asarray(p, dtype=int).reshape(-1, 2)
        scalar = select_nodes(geo.scalar, nodes)
        if np.any(scalar <= 0):
            raise NonpositiveCurvature(f'Scalar curvature should be positive at the probed nodes, '
                                       f'minimum {np.min(scalar)!r} found.')
        # Hess log R = Hess R / R - dR dR / R^2, R may change sign away from the nodes
        dR = select_nodes(geo.partial(geo.scalar), nodes)
        hessian = select_nodes(geo.hessian(geo.scalar), nodes) / scalar[:, None, None] \
            - np.einsum('ni,nj->nij', dR, dR) / scalar[:, None, None] ** 2
    else:
        g, default_t = _analytic(state)
        if g.dim != 2:
            raise ValidationError(f'The 2D Harnack form needs dimension 2, but {g.dim} given.')
        points = as_points(p, 2)
        t = default_t if t is None else t
        g.check_positive(points, t)
        scalar, hessian = (to_numpy(a) for a in _log_scalar_kernel(g.family)(g.params, jnp.asarray(points), t))
        if np.any(scalar <= 0):
            raise NonpositiveCurvature(f'Scalar curvature should be positive, minimum {np.min(scalar)!r} found.')

    directions = _directions(nu, hessian.shape[0], 2)
    values = np.einsum('nij,ni,nj->n', hessian, directions, directions) + scalar / 2 + 1 / (2 * np.asarray(tau))
    return float(values[0]) if np.asarray(p).ndim == 1 else values
