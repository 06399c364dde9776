"""
Overview:
    Closed-form ambient backgrounds: flat plane and torus, the round sphere family,
    the steady cigar soliton and the Gaussian expander.

    Every background carries a potential ``f``, so soliton identities such as
    ``Hess f + Ric = g / 2(T - t)`` can be evaluated in closed form. On the round sphere, the flat
    kinds and the Gaussian expander, the density ``u = exp(-f)`` also solves the conjugate heat
    equation of the flow. The cigar potential only satisfies the steady soliton equation in its
    frozen chart.
"""
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .base import MetricField
from .torus import conformal_christoffel
from ..utils.error import ValidationError, TimeOutOfRange

BACKGROUND_KINDS = ('flat_plane', 'flat_torus', 'round_sphere', 'cigar', 'gaussian_expander')
FLOW_DIRECTIONS = ('ricci', 'backward_ricci', 'static')


def direction_sign(direction: str) -> int:
    """
    ``+1`` for Ricci flow, ``-1`` for backward Ricci flow and ``0`` for a static ambient,
    so that ``g_t = -2 * sign * Ric``.
    """
    if direction == 'ricci':
        return 1
    elif direction == 'backward_ricci':
        return -1
    elif direction == 'static':
        return 0
    else:
        raise ValidationError(f'Unknown flow direction - {direction!r}.')


@dataclass(frozen=True)
class BackgroundValues:
    """
    Closed-form data of a background at a batch of points, tensors carry the point index first.
    ``ddf`` is the covariant Hessian of ``f``.
    """
    g: np.ndarray
    R: np.ndarray
    Ric: np.ndarray
    f: np.ndarray
    df: np.ndarray
    ddf: np.ndarray


@dataclass(frozen=True)
class AnalyticBackground:
    """
    Closed-form background of the given ``kind``.

    :param kind: One of ``flat_plane``, ``flat_torus``, ``round_sphere``, ``cigar``, ``gaussian_expander``.
    :param rho0: Sphere radius at ``t = 0``.
    :param T_ext: Extremal time of the soliton, derived for the round sphere and ``0`` by default
        for the Gaussian expander.
    :param flow_direction: One of ``ricci``, ``backward_ricci``, ``static``. Only the round sphere
        evolves, the other kinds require ``static``.
    :param period: Period of the flat torus.
    """
    kind: str
    rho0: float = 1.0
    T_ext: Optional[float] = None
    flow_direction: str = 'static'
    period: float = 2 * math.pi

    def __post_init__(self):
        if self.kind not in BACKGROUND_KINDS:
            raise ValidationError(f'Unknown background kind - {self.kind!r}.')
        direction_sign(self.flow_direction)
        if self.rho0 <= 0:
            raise ValidationError(f'Sphere radius should be positive, but {self.rho0!r} found.')
        if self.period <= 0:
            raise ValidationError(f'Torus period should be positive, but {self.period!r} found.')

        if self.kind == 'round_sphere':
            expected = self._sphere_extremal_time()
            if self.T_ext is None:
                object.__setattr__(self, 'T_ext', expected)
            elif expected is None or not math.isclose(self.T_ext, expected, rel_tol=1e-12, abs_tol=1e-12):
                raise ValidationError(f'Extremal time {self.T_ext!r} does not match the sphere family, '
                                      f'{expected!r} expected.')
        elif self.kind == 'gaussian_expander':
            if self.T_ext is None:
                object.__setattr__(self, 'T_ext', 0.0)
        elif self.T_ext is not None:
            raise ValidationError(f'Background {self.kind!r} has no extremal time, but {self.T_ext!r} given.')

        if self.kind != 'round_sphere' and self.flow_direction != 'static':
            # fixed points of the flow up to diffeomorphism, sampled in a frozen chart
            raise ValidationError(f'Background {self.kind!r} is sampled in a frozen chart and only flows '
                                  f'as \'static\', but {self.flow_direction!r} given.')

    def _sphere_extremal_time(self) -> Optional[float]:
        sign = direction_sign(self.flow_direction)
        if sign == 0:
            return None
        else:
            return sign * self.rho0 ** 2 / 2

    @property
    def sign(self) -> int:
        return direction_sign(self.flow_direction)

    @property
    def is_compact(self) -> bool:
        return self.kind in {'flat_torus', 'round_sphere'}

    @property
    def periods(self) -> Optional[Tuple[Optional[float], Optional[float]]]:
        if self.kind == 'flat_torus':
            return self.period, self.period
        elif self.kind == 'round_sphere':
            return None, 2 * math.pi
        else:
            return None

    def radius_sq(self, t: float) -> float:
        """
        ``rho(t)^2 = rho0^2 - 2 * sign * t`` of the round sphere family.
        """
        return self.rho0 ** 2 - 2 * self.sign * t

    def check_time(self, t: float):
        if self.kind == 'round_sphere':
            if self.radius_sq(t) <= 0:
                raise TimeOutOfRange(f'Sphere radius squared is {self.radius_sq(t)!r} at t={t!r}, '
                                     f'the family ends at {self.T_ext!r}.')
        elif self.kind == 'gaussian_expander':
            if t <= self.T_ext:
                raise TimeOutOfRange(f'Gaussian expander is defined for t > {self.T_ext!r}, but t={t!r} given.')

    def at(self, t: float) -> 'BackgroundSnapshot':
        self.check_time(t)
        return BackgroundSnapshot(self, t)

    def as_metric_dim(self):
        """
        The same metric as a closed-form :class:`flowlab.tensorlab.AnalyticMetricDim`,
        differentiable by dual numbers in space and time.
        """
        from ..tensorlab.metric import AnalyticMetricDim
        from ..tensorlab import families

        if self.kind == 'round_sphere':
            return AnalyticMetricDim(families.round_sphere_metric, (self.rho0 ** 2, float(self.sign)), dim=2)
        elif self.kind == 'cigar':
            return AnalyticMetricDim(families.cigar_metric, (), dim=2)
        else:
            return AnalyticMetricDim(families.euclidean_metric, (), dim=2)


def _flat_eval(b: AnalyticBackground, points: np.ndarray, t: float) -> BackgroundValues:
    n = points.shape[0]
    g = np.broadcast_to(np.eye(2), (n, 2, 2)).copy()
    zero = np.zeros(n)
    if b.kind == 'gaussian_expander':
        s = t - b.T_ext
        r2 = np.sum(points ** 2, axis=-1)
        f = -r2 / (4 * s) + math.log(s)
        df = -points / (2 * s)
        ddf = np.broadcast_to(-np.eye(2) / (2 * s), (n, 2, 2)).copy()
    else:
        f, df, ddf = zero.copy(), np.zeros((n, 2)), np.zeros((n, 2, 2))
    return BackgroundValues(g=g, R=zero.copy(), Ric=np.zeros((n, 2, 2)), f=f, df=df, ddf=ddf)


def _sphere_eval(b: AnalyticBackground, points: np.ndarray, t: float) -> BackgroundValues:
    n = points.shape[0]
    rho2 = b.radius_sq(t)
    theta = points[:, 0]
    g = np.zeros((n, 2, 2))
    g[:, 0, 0] = rho2
    g[:, 1, 1] = rho2 * np.sin(theta) ** 2
    R = np.full(n, 2 / rho2)
    if b.sign == 0:
        f = np.zeros(n)
    else:
        f = np.full(n, math.log(b.sign * (b.T_ext - t)))
    return BackgroundValues(g=g, R=R, Ric=g / rho2, f=f, df=np.zeros((n, 2)), ddf=np.zeros((n, 2, 2)))


def _cigar_eval(b: AnalyticBackground, points: np.ndarray, t: float) -> BackgroundValues:
    w = 1 + np.sum(points ** 2, axis=-1)
    g = (1 / w)[:, None, None] * np.eye(2)
    R = 4 / w
    f = -np.log(w)
    df = -2 * points / w[:, None]
    hess = -2 * np.eye(2) / w[:, None, None] + 4 * np.einsum('ni,nj->nij', points, points) / (w ** 2)[:, None, None]
    gamma = conformal_christoffel(-points / w[:, None])
    ddf = hess - np.einsum('nkij,nk->nij', gamma, df)
    return BackgroundValues(g=g, R=R, Ric=0.5 * R[:, None, None] * g, f=f, df=df, ddf=ddf)


def background_eval(b: AnalyticBackground, p: np.ndarray, t: float) -> BackgroundValues:
    """
    Evaluate ``g``, ``R``, ``Ric``, ``f``, ``grad f`` and ``Hess f`` of a background.

    :param b: The background.
    :type b: AnalyticBackground
    :param p: Chart points with shape ``(N, 2)`` (a single point is accepted as well).
        The round sphere uses the chart ``(theta, phi)``, the other kinds Cartesian ``(x, y)``.
    :type p: np.ndarray
    :param t: Time, must lie inside the background's interval of existence.
    :type t: float
    :returns: Batched closed-form values.
    :rtype: BackgroundValues
    :raises TimeOutOfRange: When the sphere radius vanishes at ``t`` or ``t <= T_min`` for the expander.

    Examples::
        >>> import numpy as np
        >>> from flowlab.geometry import AnalyticBackground, background_eval
        >>> b = AnalyticBackground('round_sphere', rho0=np.sqrt(2.0), flow_direction='ricci')
        >>> v = background_eval(b, np.array([[1.0, 0.5]]), 0.25)
        >>> v.ddf + v.Ric - v.g / (2 * (b.T_ext - 0.25))  # shrinking soliton equation
        array([[[0., 0.],
                [0., 0.]]])
    """
    b.check_time(t)
    points = np.atleast_2d(np.asarray(p, dtype=float))
    if b.kind in {'flat_plane', 'flat_torus', 'gaussian_expander'}:
        return _flat_eval(b, points, t)
    elif b.kind == 'round_sphere':
        return _sphere_eval(b, points, t)
    else:
        return _cigar_eval(b, points, t)


@dataclass(frozen=True)
class BackgroundSnapshot(MetricField):
    """
    A background frozen at time ``time``, seen as a :class:`MetricField`.
    """
    background: AnalyticBackground
    time: float

    @property
    def t(self) -> float:
        return self.time

    @property
    def is_compact(self) -> bool:
        return self.background.is_compact

    @property
    def periods(self):
        return self.background.periods

    def values(self, points: np.ndarray) -> BackgroundValues:
        return background_eval(self.background, points, self.time)

    def metric_tensor(self, points: np.ndarray) -> np.ndarray:
        return self.values(points).g

    def scalar_curvature(self, points: np.ndarray) -> np.ndarray:
        return self.values(points).R

    def ricci(self, points: np.ndarray) -> np.ndarray:
        return self.values(points).Ric

    def christoffel(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        n = points.shape[0]
        kind = self.background.kind
        if kind == 'round_sphere':
            theta = points[:, 0]
            gamma = np.zeros((n, 2, 2, 2))
            gamma[:, 0, 1, 1] = -np.sin(theta) * np.cos(theta)
            gamma[:, 1, 0, 1] = gamma[:, 1, 1, 0] = np.cos(theta) / np.sin(theta)
            return gamma
        elif kind == 'cigar':
            w = 1 + np.sum(points ** 2, axis=-1)
            return conformal_christoffel(-points / w[:, None])
        else:
            return np.zeros((n, 2, 2, 2))
