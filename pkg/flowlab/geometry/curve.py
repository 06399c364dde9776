"""
Overview:
    Closed polylines immersed in a 2D metric, with their geodesic curvature, unit normal and
    arclength element.

    Derivatives are centered differences in the uniform vertex parameter (4th-order), so
    periodic quadratures of smooth integrands converge fast under vertex refinement.
    Curves wrapping a chart period (latitudes in the sphere chart, straight loops on the torus)
    are closed through :attr:`CurveState.closing_shift`.
"""
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from .base import MetricField
from ..config.defaults import EPS_EDGE_FACTOR
from ..utils.error import ValidationError, DegenerateCurve


@dataclass(frozen=True)
class CurveFrame:
    """
    Per-vertex geometry of a curve: unit tangent, unit normal ``nu``, geodesic curvature ``k``
    and arclength element ``ds`` (per unit vertex parameter, so ``sum(ds)`` is the length).
    """
    tangent: np.ndarray
    normal: np.ndarray
    k: np.ndarray
    ds: np.ndarray
    g: np.ndarray


def _neighbour(vertices: np.ndarray, offset: int, shift: np.ndarray) -> np.ndarray:
    n = vertices.shape[0]
    index = np.arange(n) + offset
    wraps = np.floor_divide(index, n)
    return vertices[index % n] + wraps[:, None] * shift


@dataclass(frozen=True, eq=False)
class CurveState:
    """
    Closed polyline in chart coordinates, optionally bound to the metric it lives in.

    :param vertices: Ordered vertices with shape ``(N, 2)``, treated cyclically.
    :param t: Time stamp.
    :param metric: Ambient metric used for the derived quantities.
    :param closing_shift: Chart translation from the last vertex's successor back to the first vertex,
        zero for contractible curves.
    :param eps_edge: Smallest admissible edge length, ``EPS_EDGE_FACTOR * mean edge length`` by default.
    """
    vertices: np.ndarray
    t: float = 0.0
    metric: Optional[MetricField] = None
    closing_shift: np.ndarray = field(default_factory=lambda: np.zeros(2))
    eps_edge: Optional[float] = None

    def __post_init__(self):
        vertices = np.array(self.vertices, dtype=float)
        if vertices.ndim != 2 or vertices.shape[1] != 2:
            raise ValidationError(f'Curve vertices should have shape (N, 2), but {vertices.shape!r} found.')
        if vertices.shape[0] < 8:
            raise ValidationError(f'Curve needs at least 8 vertices, but {vertices.shape[0]} found.')
        if not np.all(np.isfinite(vertices)):
            raise ValidationError('Curve vertices contain non-finite values.')
        shift = np.array(self.closing_shift, dtype=float).reshape(2)
        vertices.setflags(write=False)
        shift.setflags(write=False)
        object.__setattr__(self, 'vertices', vertices)
        object.__setattr__(self, 'closing_shift', shift)
        if self.eps_edge is None:
            object.__setattr__(self, 'eps_edge', EPS_EDGE_FACTOR * float(np.mean(self.edge_lengths())))

    @classmethod
    def circle(cls, radius: float, n: int = 512, center: Tuple[float, float] = (0.0, 0.0),
               t: float = 0.0, metric: Optional[MetricField] = None) -> 'CurveState':
        """
        Counter-clockwise coordinate circle.
        """
        if radius <= 0:
            raise ValidationError(f'Circle radius should be positive, but {radius!r} found.')
        angles = np.arange(n) * (2 * math.pi / n)
        vertices = np.stack([center[0] + radius * np.cos(angles), center[1] + radius * np.sin(angles)], axis=-1)
        return cls(vertices, t, metric)

    @classmethod
    def latitude(cls, theta0: float, n: int = 512, t: float = 0.0,
                 metric: Optional[MetricField] = None) -> 'CurveState':
        """
        Latitude circle ``theta = theta0`` in the ``(theta, phi)`` sphere chart.
        """
        if not 0 < theta0 < math.pi:
            raise ValidationError(f'Polar angle should lie in (0, pi), but {theta0!r} found.')
        angles = np.arange(n) * (2 * math.pi / n)
        vertices = np.stack([np.full(n, theta0), angles], axis=-1)
        return cls(vertices, t, metric, closing_shift=np.array([0.0, 2 * math.pi]))

    @classmethod
    def straight_loop(cls, offset: float, period: float, n: int = 512, axis: int = 1, t: float = 0.0,
                      metric: Optional[MetricField] = None) -> 'CurveState':
        """
        Closed geodesic of a flat torus, running once around the period along ``axis``.
        """
        params = np.arange(n) * (period / n)
        vertices = np.zeros((n, 2))
        vertices[:, axis] = params
        vertices[:, 1 - axis] = offset
        shift = np.zeros(2)
        shift[axis] = period
        return cls(vertices, t, metric, closing_shift=shift)

    def __len__(self):
        return self.vertices.shape[0]

    @property
    def is_latitude(self) -> bool:
        return np.allclose(self.closing_shift, [0.0, 2 * math.pi]) and \
            np.ptp(self.vertices[:, 0]) <= 1e-12

    def with_vertices(self, vertices: np.ndarray, t: float, metric: Optional[MetricField] = None) -> 'CurveState':
        return CurveState(vertices, t, metric or self.metric, self.closing_shift, self.eps_edge)

    def with_metric(self, metric: MetricField) -> 'CurveState':
        return CurveState(self.vertices, self.t, metric, self.closing_shift, self.eps_edge)

    def edges(self) -> np.ndarray:
        return _neighbour(self.vertices, 1, self.closing_shift) - self.vertices

    def edge_lengths(self, metric: Optional[MetricField] = None) -> np.ndarray:
        """
        Edge lengths measured with ``metric`` at the edge midpoints, or chart lengths without a metric.
        """
        metric = metric or self.metric
        edges = self.edges()
        if metric is None:
            return np.linalg.norm(edges, axis=-1)
        g = metric.metric_tensor(self.vertices + 0.5 * edges)
        return np.sqrt(np.einsum('ni,nij,nj->n', edges, g, edges))

    @cached_property
    def frame(self) -> CurveFrame:
        if self.metric is None:
            raise ValidationError('Curve is not bound to any metric.')
        return curve_frame(self, self.metric)

    @property
    def k(self) -> np.ndarray:
        return self.frame.k

    @property
    def normal(self) -> np.ndarray:
        return self.frame.normal

    @property
    def tangent(self) -> np.ndarray:
        return self.frame.tangent

    @property
    def ds(self) -> np.ndarray:
        return self.frame.ds

    @property
    def length(self) -> float:
        return float(np.sum(self.ds))


def _check_edges(c: CurveState, metric: MetricField):
    lengths = c.edge_lengths(metric)
    if np.min(lengths) < c.eps_edge:
        raise DegenerateCurve(f'Adjacent vertices {int(np.argmin(lengths))} are {np.min(lengths):.3g} apart, '
                              f'below the edge threshold {c.eps_edge:.3g}.')


def curve_frame(c: CurveState, m: MetricField) -> CurveFrame:
    """
    Tangent, normal, geodesic curvature and arclength element of ``c`` in the metric ``m``.

    The normal is rotated from the tangent so that ``x <- x + dt * k * nu`` shrinks a
    counter-clockwise convex curve of the flat plane, and ``k = g(D_s x', nu)``.
    """
    _check_edges(c, m)
    v, shift = c.vertices, c.closing_shift
    p1, m1 = _neighbour(v, 1, shift), _neighbour(v, -1, shift)
    p2, m2 = _neighbour(v, 2, shift), _neighbour(v, -2, shift)
    d1 = (-p2 + 8 * p1 - 8 * m1 + m2) / 12
    d2 = (-p2 + 16 * p1 - 30 * v + 16 * m1 - m2) / 12

    g = m.metric_tensor(v)
    gamma = m.christoffel(v)
    speed = np.sqrt(np.einsum('ni,nij,nj->n', d1, g, d1))
    tangent = d1 / speed[:, None]

    covector = np.stack([-d1[:, 1], d1[:, 0]], axis=-1)
    raised = np.linalg.solve(g, covector[..., None])[..., 0]
    normal = raised / np.sqrt(np.einsum('ni,ni->n', covector, raised))[:, None]

    acceleration = d2 + np.einsum('nkij,ni,nj->nk', gamma, d1, d1)
    k = np.einsum('ni,nij,nj->n', acceleration, g, normal) / speed ** 2
    return CurveFrame(tangent=tangent, normal=normal, k=k, ds=speed, g=g)


def geodesic_curvature(c: CurveState, m: Optional[MetricField] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Geodesic curvature ``k`` and unit normal ``nu`` at every vertex.

    :param c: The curve.
    :type c: CurveState
    :param m: Ambient metric, the curve's own metric when omitted.
    :type m: Optional[MetricField]
    :returns: Tuple ``(k, nu)`` with shapes ``(N,)`` and ``(N, 2)``.
    :raises DegenerateCurve: When adjacent vertices are closer than ``c.eps_edge``.

    Examples::
        >>> from flowlab.geometry import AnalyticBackground, CurveState, geodesic_curvature
        >>> m = AnalyticBackground('flat_plane').at(0.0)
        >>> k, nu = geodesic_curvature(CurveState.circle(2.0, 512), m)
        >>> k[:3]  # 1 / r
        array([0.5, 0.5, 0.5])
    """
    if m is None:
        frame = c.frame
    else:
        frame = curve_frame(c, m)
    return frame.k, frame.normal


def curve_integral(c: CurveState, w) -> float:
    """
    Cyclic trapezoidal quadrature of ``w ds`` along ``c``, one sample of ``w`` per vertex.
    """
    w = np.broadcast_to(np.asarray(w, dtype=float), (len(c),))
    return float(np.sum(w * c.ds))


def midpoint_refine(c: CurveState) -> CurveState:
    """
    Double the vertices by inserting chart midpoints.
    """
    n = len(c)
    vertices = np.empty((2 * n, 2))
    vertices[0::2] = c.vertices
    vertices[1::2] = c.vertices + 0.5 * c.edges()
    return CurveState(vertices, c.t, c.metric, c.closing_shift)


def resample_uniform(c: CurveState, metric: Optional[MetricField] = None) -> CurveState:
    """
    Redistribute the vertices uniformly in arclength, keeping the first vertex and the vertex count.

    The chart coordinates are represented by a periodic cubic spline in the cumulative edge length,
    after removing the linear drift of a wrapping curve.
    """
    metric = metric or c.metric
    n = len(c)
    lengths = c.edge_lengths(metric)
    s = np.concatenate([[0.0], np.cumsum(lengths)])
    total = s[-1]
    drift = np.outer(s / total, c.closing_shift)
    closed = np.concatenate([c.vertices, c.vertices[:1] + c.closing_shift], axis=0) - drift
    closed[-1] = closed[0]
    spline = CubicSpline(s, closed, axis=0, bc_type='periodic')
    targets = np.arange(n) * (total / n)
    vertices = spline(targets) + np.outer(targets / total, c.closing_shift)
    return CurveState(vertices, c.t, metric, c.closing_shift, c.eps_edge)
