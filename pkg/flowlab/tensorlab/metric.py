"""
Overview:
    Closed-form metrics and tensor fields of dimension 2 or 3, and the random trigonometric ensembles
    used to exercise the identity checks.
"""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import families
from ..config.defaults import EIGENVALUE_FLOOR, RANDOM_METRIC_EPS
from ..utils.dual import jnp, to_numpy
from ..utils.error import ValidationError, SingularMetric

MetricFamily = Callable[[tuple, jnp.ndarray, float], jnp.ndarray]


@dataclass(frozen=True, eq=False)
class AnalyticMetricDim:
    """
    Metric ``g_ij(x, t) = family(params, x, t)`` on a chart of dimension ``dim``.

    :param family: Module-level closed-form family, see :mod:`flowlab.tensorlab.families`.
    :param params: Parameters of the family, traced by jax.
    :param dim: Dimension, ``2`` or ``3``.
    :param seed: Seed the parameters were drawn with, if any.
    """
    family: MetricFamily
    params: tuple = ()
    dim: int = 2
    seed: Optional[int] = None

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValidationError(f'Only dimensions 2 and 3 are supported, but {self.dim!r} given.')

    @property
    def name(self) -> str:
        return self.family.__name__

    def __call__(self, x, t: float = 0.0):
        return self.family(self.params, x, t)

    def check_positive(self, points: np.ndarray, t: float = 0.0):
        """
        Raise :class:`SingularMetric` unless the metric is symmetric positive definite at every point.
        """
        from .calculus import metric_values

        g = metric_values(self, points, t)
        if not np.all(np.isfinite(g)):
            raise SingularMetric(f'Metric {self.name!r} is not finite at some probed points.')
        if np.max(np.abs(g - np.swapaxes(g, -1, -2))) > 1e-12:
            raise SingularMetric(f'Metric {self.name!r} is not symmetric.')
        lowest = float(np.min(np.linalg.eigvalsh(g)))
        if lowest <= EIGENVALUE_FLOOR:
            raise SingularMetric(f'Metric {self.name!r} has eigenvalue {lowest:.3g} '
                                 f'below the floor {EIGENVALUE_FLOOR:.1g}.')


@dataclass(frozen=True, eq=False)
class AnalyticField:
    """
    Covariant tensor field ``T(x, t) = family(params, x, t)`` of the given rank.
    """
    family: Callable
    params: tuple = ()
    rank: int = 0

    @property
    def name(self) -> str:
        return self.family.__name__

    def __call__(self, x, t: float = 0.0):
        return self.family(self.params, x, t)


@dataclass(frozen=True, eq=False)
class TensorValue:
    """
    Components of a tensor at one or several points (leading axis), with its index positions
    (``'u'`` for upper, ``'d'`` for lower) and the symbol it realizes.
    """
    components: np.ndarray
    indices: str
    symbol: str = ''

    @property
    def rank(self) -> int:
        return len(self.indices)

    def symmetry_defect(self, first: int, second: int, antisymmetric: bool = False) -> float:
        """
        Max-norm of ``T - T^swap`` (or ``T + T^swap``) for the swap of two index slots.
        """
        offset = self.components.ndim - self.rank
        swapped = np.swapaxes(self.components, offset + first, offset + second)
        if antisymmetric:
            return float(np.max(np.abs(self.components + swapped)))
        else:
            return float(np.max(np.abs(self.components - swapped)))


def _symmetric_coefficients(rng: np.random.Generator, dim: int, n_waves: int) -> np.ndarray:
    coef = rng.uniform(-1.0, 1.0, size=(dim, dim, n_waves, 2))
    coef = 0.5 * (coef + np.swapaxes(coef, 0, 1))
    row_sum = np.max(np.sum(np.abs(coef), axis=(1, 2, 3)))
    return coef / row_sum


def random_trig_metric(dim: int, seed: int, eps: float = RANDOM_METRIC_EPS, modes: int = 3,
                       n_probe: int = 64, max_tries: int = 100) -> AnalyticMetricDim:
    """
    Random metric ``g = delta + eps * S(x)``, ``S`` a symmetric trigonometric polynomial on the torus
    with ``modes`` harmonics per axis. Draws are rejected until ``g`` is positive definite at
    ``n_probe`` random points.

    :raises SingularMetric: When no admissible draw was found.
    """
    rng = np.random.default_rng(seed)
    waves = families.trig_waves(dim, modes)
    for _ in range(max_tries):
        coef = _symmetric_coefficients(rng, dim, waves.shape[0])
        metric = AnalyticMetricDim(families.trig_metric, (float(eps), jnp.asarray(waves), jnp.asarray(coef)),
                                   dim=dim, seed=seed)
        try:
            metric.check_positive(rng.uniform(0, 2 * np.pi, size=(n_probe, dim)))
        except SingularMetric:
            continue
        else:
            return metric

    raise SingularMetric(f'No positive definite metric found after {max_tries} draws of seed {seed!r}.')


def random_trig_scalar(dim: int, seed: int, modes: int = 3) -> AnalyticField:
    rng = np.random.default_rng(seed)
    waves = families.trig_waves(dim, modes)
    coef = rng.uniform(-1.0, 1.0, size=(waves.shape[0], 2))
    return AnalyticField(families.trig_scalar, (jnp.asarray(waves), jnp.asarray(coef)), rank=0)


def random_trig_covector(dim: int, seed: int, modes: int = 3) -> AnalyticField:
    rng = np.random.default_rng(seed)
    waves = families.trig_waves(dim, modes)
    coef = rng.uniform(-1.0, 1.0, size=(dim, waves.shape[0], 2))
    return AnalyticField(families.trig_covector, (jnp.asarray(waves), jnp.asarray(coef)), rank=1)


def random_trig_two_form(dim: int, seed: int, modes: int = 3) -> AnalyticField:
    rng = np.random.default_rng(seed)
    waves = families.trig_waves(dim, modes)
    coef = rng.uniform(-1.0, 1.0, size=(dim, dim, waves.shape[0], 2))
    return AnalyticField(families.trig_two_form, (jnp.asarray(waves), jnp.asarray(coef)), rank=2)


def conformal_trig_metric(seed: int, amplitude: float = 0.3, modes: int = 3) -> AnalyticMetricDim:
    """
    Random 2D conformal metric ``exp(2 phi) delta``, ``phi`` a trigonometric polynomial of sup-norm
    at most ``amplitude``.
    """
    rng = np.random.default_rng(seed)
    waves = families.trig_waves(2, modes)
    coef = rng.uniform(-1.0, 1.0, size=(waves.shape[0], 2))
    coef = amplitude * coef / np.sum(np.abs(coef))
    return AnalyticMetricDim(families.conformal_trig_metric, (jnp.asarray(waves), jnp.asarray(coef)),
                             dim=2, seed=seed)


def conformal_factor(metric: AnalyticMetricDim) -> Callable:
    """
    ``phi(x)`` of a metric built by :func:`conformal_trig_metric`, as a jax-traceable function.
    """
    if metric.family is not families.conformal_trig_metric:
        raise ValidationError(f'Metric {metric.name!r} is not a conformal trigonometric metric.')
    waves, coef = metric.params

    def _phi(x):
        return families.trig_scalar((waves, coef), x, 0.0)

    return _phi


def as_points(points, dim: int) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    if points.shape[-1] != dim:
        raise ValidationError(f'Points of dimension {points.shape[-1]} given for a metric of dimension {dim}.')
    return np.atleast_2d(points)


def squeeze_single(value, points) -> np.ndarray:
    value = to_numpy(value)
    return value[0] if np.asarray(points).ndim == 1 else value
