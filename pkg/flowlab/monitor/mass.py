"""
Overview:
    Total mass ``int_M u dV_g(t)`` of the density along a compact ambient trajectory.
"""
import math
from typing import Optional, Sequence

import numpy as np

from ..flows.trajectory import FlowTrajectory
from ..geometry import ConformalTorus, GridScalarField, ScalarField
from ..tensorlab import families
from ..utils.error import ValidationError, NoncompactAmbient

_SPHERE_NODES = 64
_TORUS_NODES = 128


def _is_constant(u: ScalarField) -> bool:
    return getattr(u, 'family', None) is families.constant_scalar


def _torus_mass(metric: ConformalTorus, u: ScalarField) -> float:
    if isinstance(u, GridScalarField):
        metric.check_same_grid(u.torus)
        values = u.values if u.role == 'u' else np.exp(-u.values)
    else:
        x, y = metric.coordinates
        values = u.density(np.stack([x.ravel(), y.ravel()], axis=-1)).reshape(x.shape)
    return float(np.sum(values * metric.conformal_weight) * metric.h_x * metric.h_y)


def _sphere_mass(rho_sq: float, u: ScalarField) -> float:
    if _is_constant(u):
        return 4 * math.pi * rho_sq * float(u.density(np.array([[1.0, 0.0]]))[0])
    nodes, weights = np.polynomial.legendre.leggauss(_SPHERE_NODES)
    azimuth = np.arange(2 * _SPHERE_NODES) * (math.pi / _SPHERE_NODES)
    theta, phi = np.meshgrid(np.arccos(nodes), azimuth, indexing='ij')
    values = u.density(np.stack([theta.ravel(), phi.ravel()], axis=-1)).reshape(theta.shape)
    return float(rho_sq * (math.pi / _SPHERE_NODES) * np.sum(weights[:, None] * values))


def _flat_torus_mass(period: float, u: ScalarField) -> float:
    axis = np.arange(_TORUS_NODES) * (period / _TORUS_NODES)
    x, y = np.meshgrid(axis, axis, indexing='ij')
    values = u.density(np.stack([x.ravel(), y.ravel()], axis=-1))
    return float(np.mean(values) * period ** 2)


def mass_integral(traj: FlowTrajectory, u: Optional[Sequence[ScalarField]] = None) -> np.ndarray:
    """
    Mass ``int_M u dV_g(t)`` at every snapshot.

    Torus grids use the periodic rectangle rule with ``dV = exp(2 phi) dx dy``. On the round sphere a
    spatially constant density gives ``4 pi rho^2 u``, other closed-form densities are integrated with
    Gauss-Legendre nodes in ``cos(theta)`` and uniform nodes in the azimuth.

    :param traj: Trajectory over a compact ambient.
    :type traj: FlowTrajectory
    :param u: Densities at every snapshot, the trajectory's own when omitted.
    :returns: Masses, one per snapshot.
    :rtype: np.ndarray
    :raises NoncompactAmbient: For the plane, the cigar and the Gaussian expander.

    Examples::
        >>> import numpy as np
        >>> from flowlab.flows import sphere_family, attach_exact_u
        >>> from flowlab.monitor import mass_integral
        >>> from flowlab.tensorlab import families
        >>> traj = attach_exact_u(sphere_family(np.sqrt(2.0), 'ricci', (0.0, 0.5), n_snapshots=3),
        ...                       families.soliton_density, (1.0, 1.0, 1.0))
        >>> np.round(mass_integral(traj) / (8 * np.pi), 8)  # u = C / tau
        array([1., 1., 1.])
    """
    if not traj.is_compact:
        kind = traj.background.kind if traj.background is not None else 'ambient'
        raise NoncompactAmbient(f'Mass is only defined on compact ambients, but {kind!r} given.')
    fields = [s.u for s in traj.snapshots] if u is None else list(u)
    if len(fields) != len(traj) or any(f is None for f in fields):
        raise ValidationError('Mass integral needs a density at every snapshot.')

    masses = []
    for snapshot, field in zip(traj.snapshots, fields):
        if isinstance(snapshot.metric, ConformalTorus):
            masses.append(_torus_mass(snapshot.metric, field))
        elif traj.background.kind == 'round_sphere':
            masses.append(_sphere_mass(traj.background.radius_sq(snapshot.t), field))
        else:
            masses.append(_flat_torus_mass(traj.background.period, field))
    return np.array(masses)
