"""
Overview:
    Conformal metrics ``g = exp(2 phi) (dx^2 + dy^2)`` on a periodic flat torus grid.
"""
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Tuple, Union

import jax
import jax.numpy as jnp
import numpy as np
from scipy import ndimage

from .base import MetricField
from .stencil import flat_laplacian, gradient
from ..utils.dual import to_numpy
from ..utils.error import ValidationError, GridMismatch

GridPoint = Tuple[int, int]


def spline_coefficients(values: np.ndarray) -> np.ndarray:
    """
    Periodic cubic B-spline coefficients of grid samples ``(nx, ny, *rest)``, per trailing component.
    """
    flat = values.reshape(*values.shape[:2], -1)
    coefficients = np.stack([
        ndimage.spline_filter(flat[:, :, c], order=3, mode='grid-wrap') for c in range(flat.shape[-1])
    ], axis=-1)
    return coefficients.reshape(values.shape)


def periodic_interpolate(values: np.ndarray, points: np.ndarray, spacing: Tuple[float, float],
                         prefiltered: bool = False) -> np.ndarray:
    """
    Periodic cubic-spline interpolation of grid samples ``(nx, ny, *rest)`` at chart points ``(N, 2)``,
    node ``(i, j)`` sitting at ``(i * h_x, j * h_y)``. ``prefiltered`` values are already
    :func:`spline_coefficients`.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    coordinates = np.stack([points[:, 0] / spacing[0], points[:, 1] / spacing[1]])
    rest = values.shape[2:]
    flat = values.reshape(*values.shape[:2], -1)
    result = np.stack([
        ndimage.map_coordinates(flat[:, :, c], coordinates, order=3, mode='grid-wrap', prefilter=not prefiltered)
        for c in range(flat.shape[-1])
    ], axis=-1)
    return result.reshape(points.shape[0], *rest)


@dataclass(frozen=True, eq=False)
class ConformalTorus(MetricField):
    """
    Conformal factor ``phi`` sampled on an ``n_x * n_y`` periodic grid of periods ``L_x * L_y``.

    Snapshots are immutable, a flow step builds a new instance through :meth:`with_phi`.
    """
    phi: np.ndarray
    L_x: float = 2 * math.pi
    L_y: float = 2 * math.pi
    time: float = 0.0
    n_x: int = field(init=False)
    n_y: int = field(init=False)

    def __post_init__(self):
        phi = np.array(self.phi, dtype=float)
        if phi.ndim != 2:
            raise ValidationError(f'Conformal factor should be a 2D grid, but shape {phi.shape!r} found.')
        n_x, n_y = phi.shape
        for name, n in [('n_x', n_x), ('n_y', n_y)]:
            if n < 16 or n % 2 != 0:
                raise ValidationError(f'Grid size {name} should be even and at least 16, but {n!r} found.')
        if not np.all(np.isfinite(phi)):
            raise ValidationError('Conformal factor contains non-finite values.')
        if self.L_x <= 0 or self.L_y <= 0:
            raise ValidationError(f'Periods should be positive, but {(self.L_x, self.L_y)!r} found.')
        phi.setflags(write=False)
        object.__setattr__(self, 'phi', phi)
        object.__setattr__(self, 'n_x', n_x)
        object.__setattr__(self, 'n_y', n_y)

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray, np.ndarray], np.ndarray], n_x: int, n_y: Optional[int] = None,
                      L_x: float = 2 * math.pi, L_y: float = 2 * math.pi, t: float = 0.0) -> 'ConformalTorus':
        """
        Sample ``phi = fn(x, y)`` on the grid nodes.
        """
        n_y = n_y or n_x
        xs = np.arange(n_x) * (L_x / n_x)
        ys = np.arange(n_y) * (L_y / n_y)
        x, y = np.meshgrid(xs, ys, indexing='ij')
        return cls(np.broadcast_to(np.asarray(fn(x, y), dtype=float), (n_x, n_y)), L_x, L_y, t)

    def with_phi(self, phi: np.ndarray, t: float) -> 'ConformalTorus':
        return ConformalTorus(phi, self.L_x, self.L_y, t)

    @property
    def t(self) -> float:
        return self.time

    @property
    def is_compact(self) -> bool:
        return True

    @property
    def periods(self) -> Tuple[float, float]:
        return self.L_x, self.L_y

    @property
    def h_x(self) -> float:
        return self.L_x / self.n_x

    @property
    def h_y(self) -> float:
        return self.L_y / self.n_y

    @property
    def h(self) -> float:
        return min(self.h_x, self.h_y)

    @property
    def spacing(self) -> Tuple[float, float]:
        return self.h_x, self.h_y

    @cached_property
    def coordinates(self) -> Tuple[np.ndarray, np.ndarray]:
        xs = np.arange(self.n_x) * self.h_x
        ys = np.arange(self.n_y) * self.h_y
        return tuple(np.meshgrid(xs, ys, indexing='ij'))

    @cached_property
    def conformal_weight(self) -> np.ndarray:
        """
        Area density ``exp(2 phi)`` at the grid nodes.
        """
        return np.exp(2 * self.phi)

    @cached_property
    def scalar_curvature_grid(self) -> np.ndarray:
        """
        ``R = -2 exp(-2 phi) lap0(phi)`` with the second-order stencil.
        """
        return -2 * flat_laplacian(self.phi, self.h_x, self.h_y, order=2) / self.conformal_weight

    @cached_property
    def _phi_gradient(self) -> np.ndarray:
        return gradient(self.phi, self.h_x, self.h_y, order=4)

    @cached_property
    def _scalar_curvature_fine(self) -> np.ndarray:
        return -2 * flat_laplacian(self.phi, self.h_x, self.h_y, order=4) / self.conformal_weight

    def check_same_grid(self, other: 'ConformalTorus'):
        if (self.n_x, self.n_y) != (other.n_x, other.n_y) or \
                not np.isclose(self.L_x, other.L_x) or not np.isclose(self.L_y, other.L_y):
            raise GridMismatch(f'Grid {self.n_x}x{self.n_y} of periods {self.periods!r} does not match '
                               f'grid {other.n_x}x{other.n_y} of periods {other.periods!r}.')

    def interpolate(self, values: np.ndarray, points: np.ndarray) -> np.ndarray:
        return periodic_interpolate(values, points, self.spacing)

    @cached_property
    def _splines(self):
        return {
            'phi': spline_coefficients(self.phi),
            'dphi': spline_coefficients(self._phi_gradient),
            'scalar': spline_coefficients(self._scalar_curvature_fine),
        }

    def _sample(self, name: str, points: np.ndarray) -> np.ndarray:
        return periodic_interpolate(self._splines[name], points, self.spacing, prefiltered=True)

    def metric_tensor(self, points: np.ndarray) -> np.ndarray:
        weight = np.exp(2 * self._sample('phi', points))
        return weight[:, None, None] * np.eye(2)

    def christoffel(self, points: np.ndarray) -> np.ndarray:
        return conformal_christoffel(self._sample('dphi', points))

    def scalar_curvature(self, points: np.ndarray) -> np.ndarray:
        return self._sample('scalar', points)


def conformal_christoffel(dphi: np.ndarray) -> np.ndarray:
    """
    Christoffel symbols ``gamma[..., k, i, j]`` of ``exp(2 phi) delta`` from the gradient of ``phi``.
    """
    eye = np.eye(dphi.shape[-1])
    return np.einsum('ki,...j->...kij', eye, dphi) + np.einsum('kj,...i->...kij', eye, dphi) \
        - np.einsum('ij,...k->...kij', eye, dphi)


def conformal_scalar_curvature(m: ConformalTorus, p: Optional[GridPoint] = None) -> Union[float, np.ndarray]:
    """
    Scalar curvature ``R = -2 exp(-2 phi) lap0(phi)`` of a conformal torus, second-order accurate.

    :param m: Conformal torus snapshot.
    :type m: ConformalTorus
    :param p: Grid node ``(i, j)``, the whole grid is returned when omitted.
    :type p: Optional[GridPoint]
    :returns: Scalar curvature at ``p`` or on the whole grid.

    Examples::
        >>> import numpy as np
        >>> from flowlab.geometry import ConformalTorus, conformal_scalar_curvature
        >>> m = ConformalTorus.from_function(lambda x, y: 0.1 * np.sin(x), 256)
        >>> conformal_scalar_curvature(m, (64, 0))  # at x = pi / 2
        0.16374...
    """
    if p is None:
        return m.scalar_curvature_grid
    i, j = p
    return float(m.scalar_curvature_grid[i % m.n_x, j % m.n_y])


def conformal_scalar_curvature_exact(phi: Callable, points: np.ndarray) -> np.ndarray:
    """
    Scalar curvature of ``exp(2 phi) delta`` for a closed-form ``phi(x)`` written with :mod:`jax.numpy`,
    the flat Laplacian is taken by dual numbers.
    """

    def _scalar(x):
        return -2 * jnp.exp(-2 * phi(x)) * jnp.trace(jax.hessian(phi)(x))

    return to_numpy(jax.vmap(_scalar)(jnp.asarray(np.atleast_2d(points), dtype=jnp.float64)))


def laplace_beltrami(m: ConformalTorus, w) -> np.ndarray:
    """
    Laplace-Beltrami operator ``exp(-2 phi) lap0(w)`` on the grid, second-order periodic stencil.

    :param m: Conformal torus snapshot.
    :type m: ConformalTorus
    :param w: Grid samples of the same shape as ``m.phi``, or a grid :class:`ScalarField`.
    :returns: ``Delta_g w`` at the grid nodes.
    :rtype: np.ndarray
    """
    values = np.asarray(getattr(w, 'values', w), dtype=float)
    if values.shape != m.phi.shape:
        raise GridMismatch(f'Field of shape {values.shape!r} is not sampled on grid {m.phi.shape!r}.')
    return flat_laplacian(values, m.h_x, m.h_y, order=2) / m.conformal_weight
