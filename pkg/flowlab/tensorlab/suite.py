"""
Overview:
    Batch runner of the identity checks over the random trigonometric ensemble, plus the two
    Harnack tensor evolutions on exact bundles.
"""
import math
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from ditk import logging
from hbutils.string import plural_word

from . import families
from .algebra import relative_residual
from .evolution import check_H_evolution, default_probe_points
from .identities import check_commutation, check_bianchi, check_hessian_laplacian_interchange
from .metric import random_trig_metric, random_trig_covector, random_trig_two_form, random_trig_scalar
from ..flows.heat import attach_exact_u
from ..flows.ricci import exact_family, sphere_family
from ..geometry import AnalyticBackground
from ..utils.error import ValidationError
from ..utils.parallel import parallel_map
from ..utils.progress import with_progress

#: Checks of the tensor identities, run on the random ensemble.
LEDGER_CHECKS = ('commutation_1form', 'commutation_2form', 'second_bianchi', 'div_ric',
                 'hessian_laplacian_interchange')
#: Checks of the Harnack tensor evolutions, run on exact bundles.
H_CHECKS = ('h_evolution_ricci', 'h_evolution_backward_ricci')
CHECK_NAMES = LEDGER_CHECKS + H_CHECKS

IDENTITY_THRESHOLD = 1e-7
H_THRESHOLD = 1e-3


@dataclass(frozen=True)
class IdentityRecord:
    check_name: str
    dim: int
    point_index: int
    residual: float


def threshold_of(check_name: str) -> float:
    """
    Acceptance threshold of a check.
    """
    if check_name in LEDGER_CHECKS:
        return IDENTITY_THRESHOLD
    elif check_name in H_CHECKS:
        return H_THRESHOLD
    else:
        raise ValidationError(f'Unknown check - {check_name!r}.')


def _ledger_task(task: Tuple[int, int, int]) -> List[IdentityRecord]:
    dim, metric_seed, n_points = task
    metric = random_trig_metric(dim, metric_seed)
    points = np.random.default_rng(metric_seed + 1).uniform(0.0, 2 * math.pi, (n_points, dim))
    covector = random_trig_covector(dim, metric_seed + 2)
    two_form = random_trig_two_form(dim, metric_seed + 3)
    scalar = random_trig_scalar(dim, metric_seed + 4)

    bianchi = check_bianchi(metric, points)
    residuals = {
        'commutation_1form': check_commutation(metric, covector, points),
        'commutation_2form': check_commutation(metric, two_form, points),
        'second_bianchi': np.maximum(bianchi.second, bianchi.div_riem),
        'div_ric': bianchi.div_ric,
        'hessian_laplacian_interchange': check_hessian_laplacian_interchange(metric, scalar, points),
    }
    return [
        IdentityRecord(name, dim, i, float(value))
        for name in LEDGER_CHECKS
        for i, value in enumerate(np.atleast_1d(residuals[name]))
    ]


def _h_records(check_name: str, result, offset: int = 0) -> List[IdentityRecord]:
    return [
        IdentityRecord(check_name, 2, offset + i, relative_residual(lhs, rhs))
        for i, (lhs, rhs) in enumerate(zip(result.lhs, result.rhs))
    ]


def h_evolution_records(n_points: int = 16, seed: int = 0) -> List[IdentityRecord]:
    """
    Harnack tensor evolutions on exact bundles: the flat torus carrying
    ``u = 1 + 0.5 exp(-(T - t)) cos x`` (mode ``ricci``), and the expanding sphere carrying ``u = R``
    (mode ``backward_ricci``), whose Harnack tensor is constant and both sides vanish.
    """
    T = 1.0
    flat = exact_family(AnalyticBackground('flat_torus'), (0.499, 0.501), n_snapshots=3, T=T, K_mode='zero')
    flat = attach_exact_u(flat, families.flat_heat_mode, (0.5, T))
    flat_points = default_probe_points(flat.background, n_points, seed)
    records = _h_records('h_evolution_ricci', check_H_evolution(flat, flat_points, mode='ricci'))

    sphere = sphere_family(1.0, 'backward_ricci', (0.2, 0.3), n_snapshots=3, T=T, K_mode='scalar_curvature')
    sphere = attach_exact_u(sphere, families.soliton_density, (1.0, sphere.background.T_ext, -1.0))
    sphere_points = default_probe_points(sphere.background, n_points, seed)
    records.extend(_h_records('h_evolution_backward_ricci',
                              check_H_evolution(sphere, sphere_points, mode='backward_ricci')))
    return records


def run_identity_suite(dims: Iterable[int] = (2, 3), n_metrics: int = 20, n_points: int = 200, seed: int = 0,
                       silent: bool = True) -> List[IdentityRecord]:
    """
    Run every identity check on ``n_metrics`` random trigonometric metrics per dimension, at ``n_points``
    random points each, then the Harnack tensor evolutions on exact bundles.

    :param dims: Dimensions of the ensemble, ``2`` and ``3``. (default: ``(2, 3)``)
    :param n_metrics: Number of random metrics per dimension. (default: ``20``)
    :type n_metrics: int
    :param n_points: Number of random points per metric. (default: ``200``)
    :type n_points: int
    :param seed: Seed of the ensemble, metric ``k`` of dimension ``d`` is drawn from
        ``seed * 1000 + 100 * d + 5 * k``. (default: ``0``)
    :type seed: int
    :param silent: Hide the progress bar. (default: ``True``)
    :returns: One record per check, metric and point, in a deterministic order.
    :rtype: List[IdentityRecord]

    Examples::
        >>> from flowlab.tensorlab import run_identity_suite
        >>> records = run_identity_suite(dims=(3,), n_metrics=1, n_points=4, seed=7)
        >>> sorted({r.check_name for r in records})
        ['commutation_1form', 'commutation_2form', 'div_ric', 'h_evolution_backward_ricci', \
'h_evolution_ricci', 'hessian_laplacian_interchange', 'second_bianchi']
    """
    dims: Sequence[int] = tuple(dims)
    if n_metrics < 1 or n_points < 1:
        raise ValidationError(f'Suite needs at least one metric and one point, '
                              f'but {n_metrics!r} metrics and {n_points!r} points given.')
    tasks = [(dim, seed * 1000 + 100 * dim + 5 * k, n_points) for dim in dims for k in range(n_metrics)]

    records: List[IdentityRecord] = []
    with with_progress(len(tasks) + 1, 'identity suite', silent=silent, unit='metric') as pbar:
        for chunk in parallel_map(_ledger_task, tasks):
            records.extend(chunk)
            pbar.update()
        records.extend(h_evolution_records(seed=seed))
        pbar.update()

    worst = {name: max((r.residual for r in records if r.check_name == name), default=0.0) for name in CHECK_NAMES}
    failed = [name for name in CHECK_NAMES if worst[name] > threshold_of(name)]
    logging.info(f'Identity suite finished with {plural_word(len(records), "record")} on '
                 f'{plural_word(len(tasks), "metric")}, worst residual {max(worst.values())!r}.')
    if failed:
        logging.warning(f'Checks above their thresholds: {", ".join(failed)}.')
    return records
