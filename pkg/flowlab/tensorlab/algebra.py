"""
Overview:
    Tensor algebra shared by the dual-number and the grid backends.

    Every function works on arrays carrying any number of leading batch axes (``...``) and accepts both
    :mod:`numpy` and :mod:`jax.numpy` arrays through the ``xp`` argument. Index conventions:

    * ``gamma[..., k, i, j]`` is the Christoffel symbol with the upper index first;
    * derivative indices come first, ``d[..., c, i, j]`` is ``nabla_c T_ij``;
    * ``riem[..., p, q, i, s]`` is the fully covariant curvature tensor with
      ``nabla_p nabla_q w_i - nabla_q nabla_p w_i = R_pqi^s w_s`` and ``Ric_ik = g^jl R_ijkl``.
"""
import numpy as np

_LETTERS = 'abcdefgh'


def christoffel_from_metric(ginv, dg, xp=np):
    """
    Christoffel symbols from the inverse metric and ``dg[..., c, a, b] = d_c g_ab``.
    """
    s = xp.einsum('...ijl->...lij', dg) + xp.einsum('...jil->...lij', dg) - dg
    return 0.5 * xp.einsum('...kl,...lij->...kij', ginv, s)


def riemann_from_christoffel(g, gamma, dgamma, xp=np):
    """
    Fully covariant curvature tensor from ``gamma`` and ``dgamma[..., c, s, a, b] = d_c gamma^s_ab``.
    """
    up = xp.einsum('...qspi->...pqis', dgamma) - xp.einsum('...psqi->...pqis', dgamma) \
         + xp.einsum('...lpi,...sql->...pqis', gamma, gamma) - xp.einsum('...lqi,...spl->...pqis', gamma, gamma)
    return xp.einsum('...st,...pqit->...pqis', g, up)


def raise_riemann_last(ginv, riem, xp=np):
    return xp.einsum('...st,...pqit->...pqis', ginv, riem)


def ricci_from_riemann(ginv, riem, xp=np):
    return xp.einsum('...jl,...ijkl->...ik', ginv, riem)


def trace(ginv, t, xp=np):
    return xp.einsum('...ij,...ij->...', ginv, t)


def raise_both(ginv, t, xp=np):
    return xp.einsum('...ia,...ab,...bj->...ij', ginv, t, ginv)


def raise_vector(ginv, v, xp=np):
    return xp.einsum('...ij,...j->...i', ginv, v)


def compose(a, ginv, b, xp=np):
    """
    ``(a . b)_ij = a_ip g^pq b_qj``.
    """
    return xp.einsum('...ip,...pq,...qj->...ij', a, ginv, b)


def christoffel_correction(gamma, t, rank: int, slot: int, xp=np):
    """
    ``gamma^s_{c i_slot} T_{... s ...}`` with the derivative index ``c`` placed first.
    """
    indices = _LETTERS[:rank]
    source = indices[:slot] + 'y' + indices[slot + 1:]
    return xp.einsum(f'...yz{indices[slot]},...{source}->...z{indices}', gamma, t)


def covariant_from_partial(partial, gamma, t, rank: int, xp=np):
    """
    Covariant derivative of a covariant tensor of the given rank from its partial derivatives.
    """
    result = partial
    for slot in range(rank):
        result = result - christoffel_correction(gamma, t, rank, slot, xp)
    return result


def laplacian_from_second(ginv, second, rank: int, xp=np):
    """
    Rough Laplacian ``g^ab nabla_a nabla_b T`` of a rank-``rank`` tensor from its second covariant derivative.
    """
    indices = _LETTERS[:rank]
    return xp.einsum(f'...yz,...yz{indices}->...{indices}', ginv, second)


def ricci_transport_terms(ginv, riem, ric, xp=np):
    """
    ``2 R_ipjq Ric^pq - 2 Ric_ip Ric^p_j``, the reaction terms of the Ricci tensor under Ricci flow.
    """
    return 2 * xp.einsum('...ipjq,...pq->...ij', riem, raise_both(ginv, ric, xp)) - 2 * compose(ric, ginv, ric, xp)


def ricci_flow_rhs(sign, ginv, riem, ric, dric, lap_ric, lap_scalar, xp=np):
    """
    Right-hand sides of the evolutions of ``Ric``, ``R`` and ``gamma`` under ``g_t = -2 * sign * Ric``.

    :returns: Tuple ``(d_t Ric, d_t R, d_t gamma)``.
    """
    ric_rhs = lap_ric + ricci_transport_terms(ginv, riem, ric, xp)
    scalar_rhs = lap_scalar + 2 * xp.einsum('...ij,...ij->...', raise_both(ginv, ric, xp), ric)
    symmetric = dric + xp.einsum('...jil->...ijl', dric) \
        - xp.einsum('...lij->...ijl', dric)
    gamma_rhs = -xp.einsum('...kl,...ijl->...kij', ginv, symmetric)
    return sign * ric_rhs, sign * scalar_rhs, sign * gamma_rhs


def hessian_laplacian_commutator(ginv, riem, ric, dric, df, ddf, xp=np):
    """
    Right-hand side of ``nabla_i nabla_j Delta f - Delta nabla_i nabla_j f``.
    """
    f_up = raise_vector(ginv, df, xp)
    f_mixed = xp.einsum('...iq,...qp->...ip', ddf, ginv)
    f_upper = raise_both(ginv, ddf, xp)
    derivative_terms = dric + xp.einsum('...jik->...ijk', dric) - xp.einsum('...kij->...ijk', dric)
    return -xp.einsum('...ijk,...k->...ij', derivative_terms, f_up) \
        - xp.einsum('...jp,...ip->...ij', ric, f_mixed) \
        - xp.einsum('...ip,...jp->...ij', ric, f_mixed) \
        - 2 * xp.einsum('...ikpj,...kp->...ij', riem, f_upper)


def h_evolution_rhs_ricci(tau, g, ginv, riem, ric, dric, lap_ric, hess_scalar, h, dh, dl, xp=np):
    """
    Right-hand side of ``(d_t + Delta) H`` for ``H = tau (Hess l - Ric) + g / 2`` under Ricci flow,
    ``l = log u`` and ``u_t = -Delta u + R u``. Ends with Hamilton's matrix quadratic plus the ``-Ric / tau`` term.
    """
    l_up = raise_vector(ginv, dl, xp)
    hh = compose(h, ginv, h, xp)
    t = xp.asarray(tau)[..., None, None]
    curvature_bracket = 2 * lap_ric - 2 * compose(ric, ginv, ric, xp) \
        + 4 * xp.einsum('...ipjq,...pq->...ij', riem, raise_both(ginv, ric, xp)) \
        - hess_scalar - ric / t
    derivative_terms = dric + xp.einsum('...jik->...ijk', dric) - 2 * xp.einsum('...kij->...ijk', dric)
    return (h - 2 * hh) / t \
        - 2 * xp.einsum('...kij,...k->...ij', dh, l_up) \
        - (compose(ric, ginv, h, xp) + compose(h, ginv, ric, xp)) \
        - 2 * xp.einsum('...ipjq,...pq->...ij', riem, raise_both(ginv, h, xp)) \
        - t * curvature_bracket \
        + 2 * t * xp.einsum('...ijk,...k->...ij', derivative_terms, l_up) \
        - 2 * t * xp.einsum('...ipjq,...p,...q->...ij', riem, l_up, l_up)


def h_evolution_rhs_backward(tau, g, ginv, riem, ric, hess_scalar, ddl, dddl, dl, xp=np):
    """
    Right-hand side of ``(d_t + Delta) H`` for ``H = tau (Hess l + Ric) + g / 2`` under backward
    Ricci flow, ``l = log u`` and ``u_t = -Delta u - R u``, written in terms of ``l``.
    """
    l_up = raise_vector(ginv, dl, xp)
    t = xp.asarray(tau)[..., None, None]
    bracket = compose(ric, ginv, ddl, xp) + compose(ddl, ginv, ric, xp) \
        - 2 * xp.einsum('...ipjq,...pq->...ij', riem, raise_both(ginv, ddl, xp)) \
        - 2 * xp.einsum('...ipjq,...pq->...ij', riem, raise_both(ginv, ric, xp)) \
        + 2 * compose(ric, ginv, ric, xp) - hess_scalar - 2 * compose(ddl, ginv, ddl, xp) \
        - 2 * xp.einsum('...kij,...k->...ij', dddl, l_up) \
        - 2 * xp.einsum('...ipjq,...p,...q->...ij', riem, l_up, l_up)
    return -ddl + t * bracket


def harnack_quadratic(tau, ginv, ric, dric, riem, hess_scalar, v, u, xp=np):
    """
    Hamilton's matrix quadratic
    ``(Hess R + 2 Ric^2 + Ric / tau - 2 nabla_k Ric U^k + 2 R_ipjq U^p U^q)(V, V)``.
    """
    matrix = hess_scalar + 2 * compose(ric, ginv, ric, xp) + ric / xp.asarray(tau)[..., None, None] \
        - 2 * xp.einsum('...kij,...k->...ij', dric, u) \
        + 2 * xp.einsum('...ipjq,...p,...q->...ij', riem, u, u)
    return xp.einsum('...ij,...i,...j->...', matrix, v, v)


def relative_residual(lhs, rhs, floor: float = 1e-10) -> float:
    """
    ``max|lhs - rhs| / max(max|lhs|, max|rhs|)``, absolute when both sides are below ``floor``.
    """
    lhs, rhs = np.asarray(lhs, dtype=float), np.asarray(rhs, dtype=float)
    difference = float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0
    scale = max(float(np.max(np.abs(lhs))) if lhs.size else 0.0, float(np.max(np.abs(rhs))) if rhs.size else 0.0)
    if scale < floor:
        return difference
    else:
        return difference / scale
