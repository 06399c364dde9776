"""
Overview:
    Tensor calculus on conformal torus grids with 4th-order periodic stencils.

    Arrays carry the two grid axes first, e.g. ``ric[i, j, a, b]``, the same algebra as the
    dual-number backend applies through the ``...`` batch axes.
"""
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np

from .algebra import covariant_from_partial, laplacian_from_second
from ..geometry.base import riemann_from_scalar
from ..geometry.stencil import gradient, flat_laplacian
from ..geometry.torus import ConformalTorus, conformal_christoffel

GridPoints = Optional[Sequence[Tuple[int, int]]]


class GridGeometry:
    """
    Metric, connection and curvature of a :class:`ConformalTorus` at every grid node.
    """

    def __init__(self, torus: ConformalTorus):
        self.torus = torus

    @cached_property
    def weight(self) -> np.ndarray:
        return np.exp(2 * self.torus.phi)

    @cached_property
    def g(self) -> np.ndarray:
        return self.weight[..., None, None] * np.eye(2)

    @cached_property
    def ginv(self) -> np.ndarray:
        return (1 / self.weight)[..., None, None] * np.eye(2)

    @cached_property
    def gamma(self) -> np.ndarray:
        return conformal_christoffel(self.partial(self.torus.phi))

    @cached_property
    def scalar(self) -> np.ndarray:
        return -2 * flat_laplacian(self.torus.phi, self.torus.h_x, self.torus.h_y, order=4) / self.weight

    @cached_property
    def ric(self) -> np.ndarray:
        return 0.5 * self.scalar[..., None, None] * self.g

    @cached_property
    def riem(self) -> np.ndarray:
        return riemann_from_scalar(self.g, self.scalar)

    def partial(self, t: np.ndarray) -> np.ndarray:
        return gradient(t, self.torus.h_x, self.torus.h_y, order=4)

    def covariant(self, t: np.ndarray, rank: int) -> np.ndarray:
        return covariant_from_partial(self.partial(t), self.gamma, t, rank)

    def hessian(self, f: np.ndarray) -> np.ndarray:
        second = self.covariant(self.partial(f), 1)
        return 0.5 * (second + np.swapaxes(second, -1, -2))

    def laplacian(self, t: np.ndarray, rank: int) -> np.ndarray:
        return laplacian_from_second(self.ginv, self.covariant(self.covariant(t, rank), rank + 1), rank)


def select_nodes(values: np.ndarray, points: GridPoints) -> np.ndarray:
    """
    Values at the given grid nodes, stacked on a leading axis, or every node when ``points`` is ``None``.
    """
    if points is None:
        return values.reshape(-1, *values.shape[2:])
    index = np.asarray(points, dtype=int).reshape(-1, 2)
    return values[index[:, 0], index[:, 1]]


def central_difference(times: Sequence[float], values: Sequence[np.ndarray]) -> np.ndarray:
    """
    Second-order derivative at the middle of three (possibly unevenly spaced) samples.
    """
    t0, t1, t2 = times
    h1, h2 = t1 - t0, t2 - t1
    return -h2 / (h1 * (h1 + h2)) * values[0] + (h2 - h1) / (h1 * h2) * values[1] \
        + h1 / (h2 * (h1 + h2)) * values[2]
