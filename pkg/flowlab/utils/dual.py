"""
Overview:
    Forward-mode dual-number differentiation on top of :mod:`jax`.

    Importing this module switches jax to double precision, every closed-form field of flowlab
    is differentiated in 64-bit arithmetic.
"""
from typing import Callable

import jax
import numpy as np

jax.config.update('jax_enable_x64', True)

import jax.numpy as jnp  # noqa: E402

FieldFn = Callable[[jnp.ndarray, float], jnp.ndarray]


def spatial_derivative(fn: FieldFn) -> FieldFn:
    """
    Partial derivatives of a tensor field ``fn(x, t)`` with the derivative index placed first,
    i.e. ``result[c, ...] = d fn[...] / d x^c``.
    """

    def _derivative(x, t):
        return jnp.moveaxis(jax.jacfwd(fn, argnums=0)(x, t), -1, 0)

    return _derivative


def time_derivative(fn: FieldFn) -> FieldFn:
    """
    Partial time derivative of a tensor field ``fn(x, t)``.
    """
    return jax.jacfwd(fn, argnums=1)


def to_numpy(value) -> np.ndarray:
    return np.asarray(value, dtype=np.float64)
