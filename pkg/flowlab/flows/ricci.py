"""
Overview:
    Ambient metric evolutions: explicit conformal Ricci flow on torus grids, and the closed-form
    families (round sphere, flat, cigar, Gaussian expander) sampled at snapshot times.

    In two dimensions ``Ric = (R / 2) g``, so ``g_t = -2 * sign * Ric`` keeps ``g = exp(2 phi) delta``
    conformal with ``phi_t = -sign * R / 2 = sign * exp(-2 phi) * Delta_0 phi``.
"""
from typing import Optional, Tuple

import numpy as np
from ditk import logging
from hbutils.string import plural_word

from .config import AmbientFlowConfig
from .trajectory import FlowTrajectory, Snapshot
from ..config.defaults import BLOWUP_PHI, INSTABILITY_JUMP
from ..geometry import ConformalTorus, AnalyticBackground
from ..geometry.stencil import flat_laplacian
from ..utils.error import BlowUp, Instability, ValidationError
from ..utils.progress import with_progress


def _conformal_rate(phi: np.ndarray, torus: ConformalTorus, sign: int) -> Tuple[np.ndarray, np.ndarray]:
    laplacian = flat_laplacian(phi, torus.h_x, torus.h_y, order=2)
    scalar = -2 * np.exp(-2 * phi) * laplacian
    return -0.5 * sign * scalar, scalar


def ricci_flow_run(initial: ConformalTorus, cfg: AmbientFlowConfig, silent: bool = True) -> FlowTrajectory:
    """
    Evolve a conformal torus metric by ``g_t = -2Q`` with the explicit midpoint (RK2) rule.

    :param initial: Metric at ``t0``.
    :type initial: ConformalTorus
    :param cfg: Flow configuration, ``Q_mode`` selects Ricci, backward Ricci or a static metric.
    :type cfg: AmbientFlowConfig
    :param silent: Hide the progress bar. (default: ``True``)
    :type silent: bool
    :returns: Snapshots at ``t0``, every ``snapshot_stride`` steps and at ``t1``.
    :rtype: FlowTrajectory
    :raises StabilityViolation: When ``dt > 0.2 * h^2 * exp(2 * min(phi))``.
    :raises BlowUp: When ``max|phi|`` exceeds 10 or ``max|R|`` exceeds ``1 / (10 * dt)``.
    :raises Instability: When one step changes ``phi`` by more than 1 or produces non-finite values.

    .. note::
        The interval is split into ``ceil((t1 - t0) / dt)`` equal steps, so the final snapshot sits at ``t1``.

    Examples::
        >>> import numpy as np
        >>> from flowlab.flows import AmbientFlowConfig, ricci_flow_run
        >>> from flowlab.geometry import ConformalTorus
        >>> torus = ConformalTorus.from_function(lambda x, y: 0.05 * np.sin(x), 32)
        >>> traj = ricci_flow_run(torus, AmbientFlowConfig('ricci', T=1.0, t_range=(0.0, 0.1), dt=1e-3,
        ...                                                   snapshot_stride=10))
        >>> len(traj), traj.times[-1]
        (11, 0.1)
    """
    cfg.check_stability(initial.h, float(np.min(initial.phi)))
    t0, t1 = cfg.t_range
    n_steps, dt = cfg.n_steps, cfg.effective_dt
    sign = cfg.q_sign

    phi = np.array(initial.phi, dtype=float)
    snapshots = [Snapshot(t0, initial.with_phi(phi, t0))]
    with with_progress(n_steps, f'{cfg.Q_mode} flow', silent=silent) as pbar:
        for step in range(1, n_steps + 1):
            t = t1 if step == n_steps else t0 + step * dt
            k1, scalar = _conformal_rate(phi, initial, sign)
            if sign != 0 and np.max(np.abs(scalar)) > 1 / (10 * dt):
                raise BlowUp(f'Scalar curvature reached {np.max(np.abs(scalar))!r}, '
                             f'above 1 / (10 * dt) = {1 / (10 * dt)!r}.', t=t - dt)
            k2, _ = _conformal_rate(phi + 0.5 * dt * k1, initial, sign)
            updated = phi + dt * k2

            if not np.all(np.isfinite(updated)):
                raise Instability('Conformal factor became non-finite.', t=t)
            jump = float(np.max(np.abs(updated - phi)))
            if jump > INSTABILITY_JUMP:
                raise Instability(f'Conformal factor jumped by {jump!r} in a single step.', t=t)
            if np.max(np.abs(updated)) > BLOWUP_PHI:
                raise BlowUp(f'Conformal factor reached {np.max(np.abs(updated))!r}, above {BLOWUP_PHI!r}.', t=t)

            phi = updated
            if step % cfg.snapshot_stride == 0 or step == n_steps:
                snapshots.append(Snapshot(t, initial.with_phi(phi, t)))
            pbar.update()

    logging.info(f'{cfg.Q_mode.capitalize()} flow finished on [{t0!r}, {t1!r}] with '
                 f'{plural_word(n_steps, "step")} and {plural_word(len(snapshots), "snapshot")}.')
    return FlowTrajectory(tuple(snapshots), cfg, provenance='numeric')


def exact_family(background: AnalyticBackground, t_range: Tuple[float, float], n_snapshots: int = 101,
                 T: Optional[float] = None, K_mode: str = 'trace_Q') -> FlowTrajectory:
    """
    Closed-form background sampled at ``n_snapshots`` equally spaced times of ``t_range``.

    :param T: Reference time of ``tau``, the extremal time of a Ricci-flow sphere by default.
    :raises TimeOutOfRange: When the family does not exist somewhere on ``t_range``.
    """
    t0, t1 = map(float, t_range)
    if n_snapshots < 2:
        raise ValidationError(f'Exact family needs at least 2 snapshots, but {n_snapshots!r} given.')
    background.check_time(t0)
    background.check_time(t1)
    if T is None:
        if background.kind == 'round_sphere' and background.sign > 0:
            T = background.T_ext
        else:
            raise ValidationError(f'Reference time T is required for background {background.kind!r} '
                                  f'flowing by {background.flow_direction!r}.')

    times = np.linspace(t0, t1, n_snapshots)
    cfg = AmbientFlowConfig(Q_mode=background.flow_direction, K_mode=K_mode, T=T, t_range=(t0, t1),
                            dt=(t1 - t0) / (n_snapshots - 1))
    snapshots = tuple(Snapshot(float(t), background.at(float(t))) for t in times)
    return FlowTrajectory(snapshots, cfg, provenance='exact', background=background)


def sphere_family(rho0: float, direction: str, t_range: Tuple[float, float], n_snapshots: int = 101,
                  T: Optional[float] = None, K_mode: str = 'trace_Q') -> FlowTrajectory:
    """
    Round sphere family ``rho(t)^2 = rho0^2 - 2 * sign * t`` sampled on ``t_range``.

    :param rho0: Radius at ``t = 0``.
    :type rho0: float
    :param direction: ``ricci``, ``backward_ricci`` or ``static``.
    :type direction: str
    :param t_range: Time interval ``(t0, t1)``.
    :param n_snapshots: Number of equally spaced snapshots. (default: ``101``)
    :param T: Reference time of ``tau``, ``T_max = rho0^2 / 2`` of the shrinking sphere by default.
        The backward and static families require it.
    :returns: Exact trajectory.
    :rtype: FlowTrajectory
    :raises TimeOutOfRange: When ``rho(t)^2 <= 0`` somewhere on ``t_range``.

    Examples::
        >>> import numpy as np
        >>> from flowlab.flows import sphere_family
        >>> traj = sphere_family(np.sqrt(2.0), 'ricci', (0.0, 0.5), n_snapshots=3, T=0.9)
        >>> traj.background.radius_sq(0.5), traj[-1].metric.scalar_curvature(np.array([[1.0, 0.0]]))
        (1.0..., array([2.]))
    """
    background = AnalyticBackground('round_sphere', rho0=rho0, flow_direction=direction)
    return exact_family(background, t_range, n_snapshots, T, K_mode)
