"""
Overview:
    Closed-form field families written with :mod:`jax.numpy`.

    Every family has the signature ``family(params, x, t)`` and is a module-level function, so it can
    serve as a static cache key of compiled kernels while ``params`` stay traced.
"""
import numpy as np

from ..utils.dual import jnp


def trig_waves(dim: int, modes: int = 3) -> np.ndarray:
    """
    Integer wave vectors of the trigonometric ensembles: ``modes`` harmonics per axis plus the
    diagonal couplings ``e_a + e_b``.
    """
    waves = []
    for axis in range(dim):
        for n in range(1, modes + 1):
            wave = np.zeros(dim)
            wave[axis] = n
            waves.append(wave)
    for a in range(dim):
        for b in range(a + 1, dim):
            wave = np.zeros(dim)
            wave[a] = wave[b] = 1
            waves.append(wave)
    return np.array(waves)


def _trig_series(waves, coef, x):
    phase = waves @ x
    return coef[..., 0] @ jnp.cos(phase) + coef[..., 1] @ jnp.sin(phase)


# metrics

def euclidean_metric(params, x, t):
    return jnp.eye(x.shape[0], dtype=x.dtype)


def round_sphere_metric(params, x, t):
    rho0_sq, sign = params
    rho_sq = rho0_sq - 2 * sign * t
    return rho_sq * jnp.diag(jnp.stack([jnp.ones_like(x[0]), jnp.sin(x[0]) ** 2]))


def cigar_metric(params, x, t):
    return jnp.eye(2, dtype=x.dtype) / (1 + jnp.sum(x ** 2))


def conformal_trig_metric(params, x, t):
    waves, coef = params
    return jnp.exp(2 * _trig_series(waves, coef, x)) * jnp.eye(x.shape[0], dtype=x.dtype)


def trig_metric(params, x, t):
    eps, waves, coef = params
    return jnp.eye(x.shape[0], dtype=x.dtype) + eps * _trig_series(waves, coef, x)


# scalars

def constant_scalar(params, x, t):
    value, = params
    return jnp.asarray(value, dtype=x.dtype) + 0 * x[0]


def trig_scalar(params, x, t):
    waves, coef = params
    return _trig_series(waves, coef, x)


def cos_first(params, x, t):
    return jnp.cos(x[0])


def first_squared(params, x, t):
    return x[0] ** 2


def cigar_potential(params, x, t):
    return -jnp.log(1 + jnp.sum(x ** 2))


def flat_heat_mode(params, x, t):
    """
    ``u = 1 + a exp(-(T - t)) cos x``, solving ``u_t = -Delta u`` on the flat torus.
    """
    amplitude, T = params
    return 1 + amplitude * jnp.exp(-(T - t)) * jnp.cos(x[0])


def soliton_density(params, x, t):
    """
    ``u = C / (sign * (T_ext - t))``, spatially constant. With ``sign = 1`` it is ``C / tau`` on the
    shrinking sphere, with ``sign = -1`` and ``C = 1`` the scalar curvature of the expanding sphere.
    """
    C, T_ext, sign = params
    return C / (sign * (T_ext - t)) + 0 * x[0]


def gaussian_density(params, x, t):
    """
    ``u = exp(-f)`` of the Gaussian expander, ``f = -|x|^2 / 4(t - T_min) + log(t - T_min)``.
    """
    T_min, = params
    s = t - T_min
    return jnp.exp(jnp.sum(x ** 2) / (4 * s)) / s


# tensors

def trig_covector(params, x, t):
    waves, coef = params
    return _trig_series(waves, coef, x)


def trig_two_form(params, x, t):
    waves, coef = params
    a = _trig_series(waves, coef, x)
    return a - a.T
