"""
Overview:
    Residuals of the tensor identities of Riemannian geometry on closed-form data: commutation of
    covariant derivatives, second Bianchi identity and its contractions, the interchange of Laplacian
    and Hessian, curvature symmetries and the 2D curvature identity.

    Residuals are absolute max-norms over the components, one per probe point.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from .algebra import raise_riemann_last, ricci_from_riemann, trace, hessian_laplacian_commutator
from .calculus import bind, riemann_fn, ricci_fn, scalar_fn, covariant_fn, covariant_tower, batched, riemann, \
    metric_values
from .metric import AnalyticMetricDim, AnalyticField, as_points, squeeze_single
from ..geometry.base import riemann_from_scalar
from ..utils.dual import jnp, spatial_derivative
from ..utils.error import ValidationError

Residual = Union[float, np.ndarray]


def _max_abs(x):
    return jnp.max(jnp.abs(x))


def _finish(value, p) -> Residual:
    value = squeeze_single(value, p)
    return float(value) if np.ndim(value) == 0 else value


@lru_cache(maxsize=None)
def _commutation_kernel(metric_family, field_family, rank: int):
    def _pointwise(metric_params, field_params, x, t):
        metric = bind(metric_family, metric_params)
        omega = bind(field_family, field_params)
        second = covariant_tower(metric, omega, rank, 2)[-1](x, t)
        lhs = second - jnp.swapaxes(second, 0, 1)
        up = raise_riemann_last(jnp.linalg.inv(metric(x, t)), riemann_fn(metric)(x, t), xp=jnp)
        w = omega(x, t)
        if rank == 1:
            rhs = jnp.einsum('pqis,s->pqi', up, w)
        else:
            rhs = jnp.einsum('pqis,sj->pqij', up, w) + jnp.einsum('pqjs,is->pqij', up, w)
        return _max_abs(lhs - rhs)

    return batched(_pointwise)


def check_commutation(g: AnalyticMetricDim, omega: AnalyticField, p, t: float = 0.0) -> Residual:
    """
    Residual of ``nabla_p nabla_q w - nabla_q nabla_p w`` against its curvature terms, for a 1-form
    ``R_pqi^s w_s`` or a 2-tensor ``R_pqi^s w_sj + R_pqj^s w_is``.

    :param g: The metric.
    :type g: AnalyticMetricDim
    :param omega: Closed-form 1-form or 2-tensor field.
    :type omega: AnalyticField
    :param p: A point or a batch of points.
    :returns: Max-norm of the residual at each point.
    """
    if omega.rank not in (1, 2):
        raise ValidationError(f'Commutation is checked on 1-forms and 2-tensors, but rank {omega.rank} given.')
    points = as_points(p, g.dim)
    g.check_positive(points, t)
    value = _commutation_kernel(g.family, omega.family, omega.rank)(g.params, omega.params, jnp.asarray(points), t)
    return _finish(value, p)


@dataclass(frozen=True)
class BianchiResiduals:
    """
    Residuals of the second Bianchi identity, of ``div Rm`` and of ``div Ric = dR / 2``.
    """
    second: Residual
    div_riem: Residual
    div_ric: Residual

    @property
    def worst(self) -> float:
        return float(max(np.max(self.second), np.max(self.div_riem), np.max(self.div_ric)))


@lru_cache(maxsize=None)
def _bianchi_kernel(metric_family):
    def _pointwise(metric_params, x, t):
        metric = bind(metric_family, metric_params)
        ginv = jnp.linalg.inv(metric(x, t))
        d_riem = covariant_fn(metric, riemann_fn(metric), 4)(x, t)
        cyclic = d_riem + jnp.einsum('bcade->abcde', d_riem) + jnp.einsum('cabde->abcde', d_riem)
        d_ric = covariant_fn(metric, ricci_fn(metric), 2)(x, t)
        div_riem = jnp.einsum('js,sijkl->ikl', ginv, d_riem) \
            - (jnp.einsum('lik->ikl', d_ric) - jnp.einsum('kil->ikl', d_ric))
        div_ric = jnp.einsum('ij,ijk->k', ginv, d_ric) - 0.5 * spatial_derivative(scalar_fn(metric))(x, t)
        return _max_abs(cyclic), _max_abs(div_riem), _max_abs(div_ric)

    return batched(_pointwise)


def check_bianchi(g: AnalyticMetricDim, p, t: float = 0.0) -> BianchiResiduals:
    """
    Residuals of ``nabla_a R_bcde + nabla_b R_cade + nabla_c R_abde = 0``, of
    ``g^js nabla_s R_ijkl = nabla_l Ric_ik - nabla_k Ric_il`` and of ``g^ij nabla_i Ric_jk = nabla_k R / 2``.
    """
    points = as_points(p, g.dim)
    g.check_positive(points, t)
    second, div_riem, div_ric = _bianchi_kernel(g.family)(g.params, jnp.asarray(points), t)
    return BianchiResiduals(second=_finish(second, p), div_riem=_finish(div_riem, p), div_ric=_finish(div_ric, p))


@lru_cache(maxsize=None)
def _interchange_kernel(metric_family, field_family):
    def _pointwise(metric_params, field_params, x, t):
        metric = bind(metric_family, metric_params)
        f = bind(field_family, field_params)
        ginv = jnp.linalg.inv(metric(x, t))
        df, ddf, _, dddd = covariant_tower(metric, f, 0, 4)

        def _laplacian(y, s):
            return trace(jnp.linalg.inv(metric(y, s)), ddf(y, s), xp=jnp)

        hess_lap = covariant_tower(metric, _laplacian, 0, 2)[-1](x, t)
        lap_hess = jnp.einsum('ab,abij->ij', ginv, dddd(x, t))
        riem = riemann_fn(metric)(x, t)
        ric = ricci_from_riemann(ginv, riem, xp=jnp)
        d_ric = covariant_fn(metric, ricci_fn(metric), 2)(x, t)
        rhs = hessian_laplacian_commutator(ginv, riem, ric, d_ric, df(x, t), ddf(x, t), xp=jnp)
        return _max_abs(hess_lap - lap_hess - rhs)

    return batched(_pointwise)


def check_hessian_laplacian_interchange(g: AnalyticMetricDim, f: AnalyticField, p, t: float = 0.0) -> Residual:
    """
    Residual of ``nabla_i nabla_j Delta f - Delta nabla_i nabla_j f`` against
    ``-(nabla_i Ric_jk + nabla_j Ric_ik - nabla_k Ric_ij) f^k - Ric_jp f_i^p - Ric_ip f^p_j - 2 R_ikpj f^kp``.
    """
    if f.rank != 0:
        raise ValidationError(f'Interchange is checked on scalar fields, but rank {f.rank} given.')
    points = as_points(p, g.dim)
    g.check_positive(points, t)
    value = _interchange_kernel(g.family, f.family)(g.params, f.params, jnp.asarray(points), t)
    return _finish(value, p)


@lru_cache(maxsize=None)
def _symmetry_kernel(metric_family):
    def _pointwise(metric_params, x, t):
        metric = bind(metric_family, metric_params)
        riem = riemann_fn(metric)(x, t)
        ric = ricci_from_riemann(jnp.linalg.inv(metric(x, t)), riem, xp=jnp)
        first_bianchi = riem + jnp.einsum('qipj->pqij', riem) + jnp.einsum('ipqj->pqij', riem)
        return jnp.max(jnp.stack([
            _max_abs(riem + jnp.einsum('qpij->pqij', riem)),
            _max_abs(riem + jnp.einsum('pqji->pqij', riem)),
            _max_abs(riem - jnp.einsum('ijpq->pqij', riem)),
            _max_abs(first_bianchi),
            _max_abs(ric - ric.T),
        ]))

    return batched(_pointwise)


def check_curvature_symmetries(g: AnalyticMetricDim, p, t: float = 0.0) -> Residual:
    """
    Worst defect among the antisymmetries and the pair symmetry of ``Rm``, the first Bianchi identity
    and the symmetry of ``Ric``.
    """
    points = as_points(p, g.dim)
    g.check_positive(points, t)
    return _finish(_symmetry_kernel(g.family)(g.params, jnp.asarray(points), t), p)


def check_two_dimensional_curvature(g: AnalyticMetricDim, p, t: float = 0.0) -> Residual:
    """
    Defect of ``R_abcd = (R / 2)(g_ac g_bd - g_ad g_bc)`` for a surface metric.
    """
    if g.dim != 2:
        raise ValidationError(f'The surface curvature identity needs dimension 2, but {g.dim} given.')
    points = as_points(p, g.dim)
    values = riemann(g, points, t)
    expected = riemann_from_scalar(metric_values(g, points, t), np.atleast_1d(values.scalar))
    defect = np.max(np.abs(values.riem.components - expected), axis=(1, 2, 3, 4))
    return _finish(defect, p)
