"""
Overview:
    Scalar fields ``u > 0`` (or potentials ``f = -log u``) sampled on a torus grid or given in closed form.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Tuple

import jax
import jax.numpy as jnp
import numpy as np

from .stencil import gradient
from .torus import ConformalTorus
from ..utils.dual import to_numpy
from ..utils.error import ValidationError, NonpositiveU, GridMismatch

FIELD_ROLES = ('u', 'f')

#: ``(value, partial derivatives, second partial derivatives)`` at a batch of points.
Jet = Tuple[np.ndarray, np.ndarray, np.ndarray]


def _check_role(role: str):
    if role not in FIELD_ROLES:
        raise ValidationError(f'Unknown field role - {role!r}.')


class ScalarField(ABC):
    """
    A positive density ``u`` (role ``u``) or its potential ``f = -log u`` (role ``f``).
    """
    role: str

    @abstractmethod
    def value(self, points: np.ndarray) -> np.ndarray:
        """
        Raw values of the field at chart points, i.e. ``u`` or ``f`` depending on the role.
        """
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def log_jet(self, points: np.ndarray) -> Jet:
        """
        ``log u`` and its first and second partial derivatives at chart points.
        """
        raise NotImplementedError  # pragma: no cover

    def density(self, points: np.ndarray) -> np.ndarray:
        values = self.value(points)
        if self.role == 'u':
            if np.any(values <= 0):
                raise NonpositiveU(f'Density is not positive, minimum {np.min(values)!r} found.')
            return values
        else:
            return np.exp(-values)

    def potential_jet(self, points: np.ndarray) -> Jet:
        """
        ``f = -log u`` and its first and second partial derivatives at chart points.
        """
        value, first, second = self.log_jet(points)
        return -value, -first, -second


@dataclass(frozen=True, eq=False)
class GridScalarField(ScalarField):
    """
    Field sampled on the nodes of a :class:`ConformalTorus`, derivatives by 4th-order stencils.
    """
    torus: ConformalTorus
    values: np.ndarray
    role: str = 'u'

    def __post_init__(self):
        _check_role(self.role)
        values = np.array(self.values, dtype=float)
        if values.shape != self.torus.phi.shape:
            raise GridMismatch(f'Field of shape {values.shape!r} is not sampled on grid {self.torus.phi.shape!r}.')
        if not np.all(np.isfinite(values)):
            raise ValidationError('Scalar field contains non-finite values.')
        if self.role == 'u' and np.min(values) <= 0:
            raise NonpositiveU(f'Density is not positive, minimum {np.min(values)!r} found.')
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @cached_property
    def log_values(self) -> np.ndarray:
        return np.log(self.values) if self.role == 'u' else -self.values

    @cached_property
    def _log_first(self) -> np.ndarray:
        return gradient(self.log_values, self.torus.h_x, self.torus.h_y)

    @cached_property
    def _log_second(self) -> np.ndarray:
        second = gradient(self._log_first, self.torus.h_x, self.torus.h_y)
        return 0.5 * (second + np.swapaxes(second, 2, 3))

    def value(self, points: np.ndarray) -> np.ndarray:
        return self.torus.interpolate(self.values, points)

    def log_jet(self, points: np.ndarray) -> Jet:
        return (self.torus.interpolate(self.log_values, points),
                self.torus.interpolate(self._log_first, points),
                self.torus.interpolate(self._log_second, points))


ScalarFamily = Callable[[tuple, jnp.ndarray, float], jnp.ndarray]


@lru_cache(maxsize=None)
def _scalar_kernels(family: ScalarFamily, role: str):
    def _log(params, x, t):
        value = family(params, x, t)
        return jnp.log(value) if role == 'u' else -value

    def _jet(params, x, t):
        return (
            _log(params, x, t),
            jax.jacfwd(_log, argnums=1)(params, x, t),
            jax.jacfwd(jax.jacfwd(_log, argnums=1), argnums=1)(params, x, t),
        )

    value_kernel = jax.jit(jax.vmap(family, in_axes=(None, 0, None)))
    jet_kernel = jax.jit(jax.vmap(_jet, in_axes=(None, 0, None)))
    return value_kernel, jet_kernel


@dataclass(frozen=True)
class AnalyticScalarField(ScalarField):
    """
    Closed-form field ``family(params, x, t)`` frozen at time ``time``, differentiated by dual numbers.

    ``family`` must be a module-level function written with :mod:`jax.numpy`, it is used as a cache key
    of the compiled kernels.
    """
    family: ScalarFamily
    params: tuple = ()
    time: float = 0.0
    role: str = 'u'

    def __post_init__(self):
        _check_role(self.role)

    @property
    def t(self) -> float:
        return self.time

    def _points(self, points: np.ndarray) -> jnp.ndarray:
        return jnp.asarray(np.atleast_2d(np.asarray(points, dtype=float)))

    def value(self, points: np.ndarray) -> np.ndarray:
        value_kernel, _ = _scalar_kernels(self.family, self.role)
        return to_numpy(value_kernel(self.params, self._points(points), self.time))

    def log_jet(self, points: np.ndarray) -> Jet:
        _, jet_kernel = _scalar_kernels(self.family, self.role)
        value, first, second = jet_kernel(self.params, self._points(points), self.time)
        if self.role == 'u' and not np.all(np.isfinite(to_numpy(value))):
            raise NonpositiveU('Density is not positive at some of the probed points.')
        return to_numpy(value), to_numpy(first), to_numpy(second)

    def at(self, t: float) -> 'AnalyticScalarField':
        return AnalyticScalarField(self.family, self.params, t, self.role)


def constant_field(value: float, t: float = 0.0, role: str = 'u') -> AnalyticScalarField:
    """
    Spatially constant field.
    """
    from ..tensorlab.families import constant_scalar

    if role == 'u' and value <= 0:
        raise NonpositiveU(f'Density is not positive, {value!r} given.')
    return AnalyticScalarField(constant_scalar, (float(value),), t, role)
