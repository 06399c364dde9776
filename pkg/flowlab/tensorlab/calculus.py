"""
Overview:
    Pointwise Riemannian calculus of closed-form metrics by nested forward-mode dual numbers.

    Curvature convention: ``R_pqi^s`` is defined by the commutation formula

    .. math::

        \\nabla_p \\nabla_q \\omega_i - \\nabla_q \\nabla_p \\omega_i = R_{pqi}{}^{s} \\omega_s,

    lowered on the last slot, ``Ric_ik = g^jl R_ijkl`` and ``R = g^ik Ric_ik``. With it the round
    sphere has ``R > 0``.

    Every public function accepts a single point of shape ``(dim,)`` or a batch ``(N, dim)``. The
    compiled kernels are cached per closed-form family.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Union

import jax
import numpy as np

from .algebra import christoffel_from_metric, riemann_from_christoffel, ricci_from_riemann, trace, \
    covariant_from_partial, laplacian_from_second
from .metric import AnalyticMetricDim, AnalyticField, TensorValue, as_points, squeeze_single
from ..utils.dual import jnp, spatial_derivative

FieldFn = Callable[[jnp.ndarray, float], jnp.ndarray]


def bind(family, params) -> FieldFn:
    def _field(x, t):
        return family(params, x, t)

    return _field


def christoffel_fn(metric: FieldFn) -> FieldFn:
    def _gamma(x, t):
        return christoffel_from_metric(jnp.linalg.inv(metric(x, t)), spatial_derivative(metric)(x, t), xp=jnp)

    return _gamma


def riemann_fn(metric: FieldFn) -> FieldFn:
    gamma = christoffel_fn(metric)

    def _riemann(x, t):
        return riemann_from_christoffel(metric(x, t), gamma(x, t), spatial_derivative(gamma)(x, t), xp=jnp)

    return _riemann


def ricci_fn(metric: FieldFn) -> FieldFn:
    riemann = riemann_fn(metric)

    def _ricci(x, t):
        return ricci_from_riemann(jnp.linalg.inv(metric(x, t)), riemann(x, t), xp=jnp)

    return _ricci


def scalar_fn(metric: FieldFn) -> FieldFn:
    ricci = ricci_fn(metric)

    def _scalar(x, t):
        return trace(jnp.linalg.inv(metric(x, t)), ricci(x, t), xp=jnp)

    return _scalar


def covariant_fn(metric: FieldFn, tensor: FieldFn, rank: int) -> FieldFn:
    """
    ``nabla T`` of a covariant tensor field of the given rank, derivative index first.
    """
    gamma = christoffel_fn(metric)

    def _covariant(x, t):
        return covariant_from_partial(spatial_derivative(tensor)(x, t), gamma(x, t), tensor(x, t), rank, xp=jnp)

    return _covariant


def covariant_tower(metric: FieldFn, tensor: FieldFn, rank: int, order: int) -> List[FieldFn]:
    """
    ``[nabla T, nabla^2 T, ..., nabla^order T]``.
    """
    tower = []
    current = tensor
    for k in range(order):
        current = covariant_fn(metric, current, rank + k)
        tower.append(current)
    return tower


def laplacian_fn(metric: FieldFn, tensor: FieldFn, rank: int) -> FieldFn:
    """
    Rough Laplacian ``g^ab nabla_a nabla_b T``.
    """
    second = covariant_tower(metric, tensor, rank, 2)[-1]

    def _laplacian(x, t):
        return laplacian_from_second(jnp.linalg.inv(metric(x, t)), second(x, t), rank, xp=jnp)

    return _laplacian


def batched(pointwise):
    """
    Compile ``pointwise(*params, x, t)`` vectorized over the points ``x``.
    """

    def _wrapped(*args):
        n_params = len(args) - 2
        in_axes = (None,) * n_params + (0, None)
        return jax.vmap(pointwise, in_axes=in_axes)(*args)

    return jax.jit(_wrapped)


@lru_cache(maxsize=None)
def _metric_kernel(family):
    def _pointwise(params, x, t):
        return family(params, x, t)

    return batched(_pointwise)


@lru_cache(maxsize=None)
def _christoffel_kernel(family):
    def _pointwise(params, x, t):
        return christoffel_fn(bind(family, params))(x, t)

    return batched(_pointwise)


@lru_cache(maxsize=None)
def _riemann_kernel(family):
    def _pointwise(params, x, t):
        metric = bind(family, params)
        riem = riemann_fn(metric)(x, t)
        ginv = jnp.linalg.inv(metric(x, t))
        ric = ricci_from_riemann(ginv, riem, xp=jnp)
        return riem, ric, trace(ginv, ric, xp=jnp)

    return batched(_pointwise)


@lru_cache(maxsize=None)
def _covariant_kernel(metric_family, field_family, rank: int, order: int):
    def _pointwise(metric_params, field_params, x, t):
        metric = bind(metric_family, metric_params)
        tower = covariant_tower(metric, bind(field_family, field_params), rank, order)
        return tuple(level(x, t) for level in tower)

    return batched(_pointwise)


def metric_values(g: AnalyticMetricDim, points, t: float = 0.0) -> np.ndarray:
    return np.asarray(_metric_kernel(g.family)(g.params, jnp.asarray(np.atleast_2d(points)), t))


def christoffel(g: AnalyticMetricDim, p, t: float = 0.0) -> TensorValue:
    """
    Christoffel symbols ``gamma[k, i, j]`` of ``g`` at ``p``.

    :param g: The metric.
    :type g: AnalyticMetricDim
    :param p: A point ``(dim,)`` or a batch of points ``(N, dim)``.
    :param t: Time of a time-dependent family. (default: ``0``)
    :type t: float
    :returns: Components with one upper and two lower indices.
    :rtype: TensorValue
    :raises SingularMetric: When ``g`` is degenerate at ``p``.

    Examples::
        >>> import numpy as np
        >>> from flowlab.tensorlab import AnalyticMetricDim, christoffel, families
        >>> sphere = AnalyticMetricDim(families.round_sphere_metric, (1.0, 0.0))
        >>> gamma = christoffel(sphere, np.array([1.0, 0.3]))
        >>> gamma.components[0, 1, 1], -np.sin(1.0) * np.cos(1.0)
        (-0.4546..., -0.4546...)
    """
    points = as_points(p, g.dim)
    g.check_positive(points, t)
    value = _christoffel_kernel(g.family)(g.params, jnp.asarray(points), t)
    return TensorValue(squeeze_single(value, p), 'udd', 'Gamma')


@dataclass(frozen=True)
class RiemannValues:
    riem: TensorValue
    ric: TensorValue
    scalar: Union[float, np.ndarray]


def riemann(g: AnalyticMetricDim, p, t: float = 0.0) -> RiemannValues:
    """
    Curvature tensor ``R_pqis``, Ricci tensor and scalar curvature of ``g`` at ``p``.
    """
    points = as_points(p, g.dim)
    g.check_positive(points, t)
    riem, ric, scalar = _riemann_kernel(g.family)(g.params, jnp.asarray(points), t)
    scalar = squeeze_single(scalar, p)
    return RiemannValues(
        riem=TensorValue(squeeze_single(riem, p), 'dddd', 'Rm'),
        ric=TensorValue(squeeze_single(ric, p), 'dd', 'Ric'),
        scalar=float(scalar) if np.ndim(scalar) == 0 else scalar,
    )


def covariant_derivatives(g: AnalyticMetricDim, T: AnalyticField, p, order: int = 3,
                          t: float = 0.0) -> List[TensorValue]:
    """
    ``[nabla T, nabla^2 T, nabla^3 T][:order]`` of a closed-form covariant tensor field,
    the outermost derivative index first.
    """
    if not 1 <= order <= 3:
        raise ValueError(f'Derivative order should be 1, 2 or 3, but {order!r} given.')
    points = as_points(p, g.dim)
    g.check_positive(points, t)
    levels = _covariant_kernel(g.family, T.family, T.rank, order)(g.params, T.params, jnp.asarray(points), t)
    return [
        TensorValue(squeeze_single(level, p), 'd' * (T.rank + k + 1), f'nabla^{k + 1} {T.name}')
        for k, level in enumerate(levels)
    ]
