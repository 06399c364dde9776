"""
Overview:
    Scenario configuration and dispatch of the command line.

    A scenario is described by one flat JSON document, parsed into :class:`ScenarioConfig`. Every
    field is range checked before anything runs, so a bad configuration always ends with a
    :class:`flowlab.utils.error.ValidationError`.
"""
import dataclasses
import json
import math
import os
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np
from ditk import logging
from hbutils.string import plural_word

from .report import emit_report
from ..config.defaults import CURVE_DT_FACTOR
from ..flows import AmbientFlowConfig, K_MODES, FlowTrajectory, ricci_flow_run, exact_family, \
    conjugate_heat_solve, attach_exact_u, terminal_bump, curve_flow_run
from ..geometry import AnalyticBackground, ConformalTorus, CurveState, BACKGROUND_KINDS, FLOW_DIRECTIONS
from ..monitor import RunBundle, monotonicity_balance, mass_integral, harnack_trace_along, harnack_matrix, \
    dim2_harnack, soliton_trace_term, HarnackSample, SOLITON_KINDS
from ..tensorlab import families, run_identity_suite, check_flow_evolutions, check_H_evolution, IdentityRecord, \
    CHECK_NAMES, H_MODES, threshold_of, GridGeometry
from ..utils.error import ValidationError, CurveCollapse, NonpositiveCurvature

SCENARIOS = ('verify-identities', 'run-flow', 'monotonicity', 'harnack', 'solitons')
AMBIENT_KINDS = BACKGROUND_KINDS + ('conformal_torus',)
CURVE_KINDS = ('circle', 'latitude', 'straight_loop')
U_KINDS = ('terminal_bump', 'constant', 'soliton', 'scalar_curvature', 'flat_heat_mode', 'gaussian')
_FLOWING_KINDS = ('round_sphere', 'conformal_torus')

_FLOAT_FIELDS = ('rho0', 'period', 't0', 't1', 'dt', 'phi_amplitude', 'curve_radius', 'curve_theta',
                 'curve_offset', 'curve_dt_factor', 'u_constant', 'u_amplitude')
_INT_FIELDS = ('seed', 'snapshot_stride', 'n_snapshots', 'grid_n', 'curve_vertices', 'n_metrics', 'n_points',
               'n_samples', 'harnack_vertices')

#: Relative residual thresholds of the flow evolution rows.
FLOW_THRESHOLDS = {
    'ricci_evolution': 1e-2,
    'scalar_evolution': 1e-2,
    'christoffel_evolution': 1e-2,
    'h_evolution': 1e-2,
    'mass_drift': 1e-3,
}
#: Relative balance residual accepted on closed-form and on numeric ambients.
EXACT_BALANCE_THRESHOLD = 1e-2
NUMERIC_BALANCE_THRESHOLD = 3e-2


def _check_choice(name: str, value, choices):
    if value not in choices:
        raise ValidationError(f'Field {name!r} should be one of {list(choices)!r}, but {value!r} found.')


def _check_range(name: str, value, low=None, high=None, low_open: bool = False, high_open: bool = False):
    if not math.isfinite(value) \
            or (low is not None and (value <= low if low_open else value < low)) \
            or (high is not None and (value >= high if high_open else value > high)):
        lb = '(' if low_open else '['
        rb = ')' if high_open else ']'
        raise ValidationError(f'Field {name!r} should lie in {lb}{low}, {high}{rb}, but {value!r} found.')


@dataclass(frozen=True)
class ScenarioConfig:
    """
    Flat configuration of one scenario run.

    The ambient is either a closed-form background (``background`` of
    :data:`flowlab.geometry.BACKGROUND_KINDS`, sampled at ``n_snapshots`` times) or a numeric conformal
    torus (``conformal_torus``, ``grid_n`` nodes per side, stepped with ``dt``). ``T`` defaults to the
    extremal time of a shrinking sphere and to ``t1 + 1`` otherwise. ``flow_direction`` defaults to
    ``ricci`` on the round sphere and the conformal torus, the other backgrounds only flow as ``static``.
    """
    scenario: str = 'monotonicity'
    seed: int = 0
    output: str = 'reports'

    background: str = 'round_sphere'
    flow_direction: Optional[str] = None
    K_mode: str = 'trace_Q'
    rho0: float = math.sqrt(2.0)
    period: float = 2 * math.pi
    T: Optional[float] = None
    t0: float = 0.0
    t1: float = 0.2
    dt: float = 1e-4
    snapshot_stride: int = 100
    n_snapshots: int = 21
    grid_n: int = 64
    phi_amplitude: float = 0.1

    curve: str = 'latitude'
    curve_radius: float = 1.0
    curve_theta: float = 1.0
    curve_offset: float = 0.0
    curve_vertices: int = 256
    curve_dt_factor: float = CURVE_DT_FACTOR
    exact_reduction: bool = True

    u: str = 'soliton'
    u_constant: float = 1.0
    u_amplitude: float = 0.5

    dims: Tuple[int, ...] = (2, 3)
    n_metrics: int = 20
    n_points: int = 200
    n_samples: int = 1000
    harnack_vertices: int = 16

    def __post_init__(self):
        for name in _FLOAT_FIELDS:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValidationError(f'Field {name!r} should be a number, but {value!r} found.')
            object.__setattr__(self, name, float(value))
        for name in _INT_FIELDS:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValidationError(f'Field {name!r} should be an integer, but {value!r} found.')
        if not isinstance(self.exact_reduction, bool):
            raise ValidationError(f'Field \'exact_reduction\' should be a boolean, '
                                  f'but {self.exact_reduction!r} found.')
        if self.T is not None:
            if isinstance(self.T, bool) or not isinstance(self.T, (int, float)) or not math.isfinite(self.T):
                raise ValidationError(f'Field \'T\' should be a finite number, but {self.T!r} found.')
            object.__setattr__(self, 'T', float(self.T))
        if isinstance(self.dims, (str, bytes)) or not isinstance(self.dims, (list, tuple)):
            raise ValidationError(f'Field \'dims\' should be a list of dimensions, but {self.dims!r} found.')
        object.__setattr__(self, 'dims', tuple(self.dims))

        _check_choice('scenario', self.scenario, SCENARIOS)
        _check_choice('background', self.background, AMBIENT_KINDS)
        if self.flow_direction is not None:
            _check_choice('flow_direction', self.flow_direction, FLOW_DIRECTIONS)
            if self.background not in _FLOWING_KINDS and self.flow_direction != 'static':
                raise ValidationError(f'Background {self.background!r} only flows as \'static\', '
                                      f'but {self.flow_direction!r} found.')
        _check_choice('K_mode', self.K_mode, K_MODES)
        _check_choice('curve', self.curve, CURVE_KINDS)
        _check_choice('u', self.u, U_KINDS)
        if not self.dims or any(d not in (2, 3) for d in self.dims):
            raise ValidationError(f'Field \'dims\' should hold dimensions 2 or 3, but {list(self.dims)!r} found.')
        if not isinstance(self.output, str) or not self.output:
            raise ValidationError(f'Field \'output\' should be a directory path, but {self.output!r} found.')

        _check_range('seed', self.seed, 0, 2 ** 64 - 1)
        _check_range('rho0', self.rho0, 0, low_open=True)
        _check_range('period', self.period, 0, low_open=True)
        _check_range('t0', self.t0)
        _check_range('t1', self.t1)
        if not self.t0 < self.t1:
            raise ValidationError(f'Time range should be increasing, but t0={self.t0!r} and t1={self.t1!r} found.')
        _check_range('dt', self.dt, 0, low_open=True)
        _check_range('snapshot_stride', self.snapshot_stride, 1)
        _check_range('n_snapshots', self.n_snapshots, 3)
        _check_range('grid_n', self.grid_n, 16)
        if self.grid_n % 2 != 0:
            raise ValidationError(f'Field \'grid_n\' should be even, but {self.grid_n!r} found.')
        _check_range('phi_amplitude', self.phi_amplitude, 0, 1, high_open=True)
        _check_range('curve_radius', self.curve_radius, 0, low_open=True)
        _check_range('curve_theta', self.curve_theta, 0, math.pi, low_open=True, high_open=True)
        _check_range('curve_offset', self.curve_offset)
        _check_range('curve_vertices', self.curve_vertices, 8)
        _check_range('curve_dt_factor', self.curve_dt_factor, 0, CURVE_DT_FACTOR, low_open=True)
        _check_range('u_constant', self.u_constant, 0, low_open=True)
        _check_range('u_amplitude', self.u_amplitude, 0, 1, high_open=True)
        _check_range('n_metrics', self.n_metrics, 1)
        _check_range('n_points', self.n_points, 1)
        _check_range('n_samples', self.n_samples, 1)
        _check_range('harnack_vertices', self.harnack_vertices, 1)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'ScenarioConfig':
        if not isinstance(data, Mapping):
            raise ValidationError(f'Scenario configuration should be a JSON object, but {type(data).__name__} found.')
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValidationError(f'Unknown configuration fields - {", ".join(map(repr, unknown))}.')
        return cls(**data)

    @classmethod
    def from_json(cls, source: str) -> 'ScenarioConfig':
        """
        Load a configuration from a JSON file, or from JSON text when ``source`` is not a file.

        Examples::
            >>> from flowlab.entry import ScenarioConfig
            >>> ScenarioConfig.from_json('{"scenario": "solitons", "n_samples": 10}').n_samples
            10
        """
        try:
            if os.path.isfile(source):
                with open(source, 'r', encoding='utf-8') as f:
                    data = json.load(f)
            else:
                data = json.loads(source)
        except json.JSONDecodeError as err:
            raise ValidationError(f'Scenario configuration is not valid JSON - {err}.') from err
        return cls.from_dict(data)

    def with_(self, **kwargs) -> 'ScenarioConfig':
        return dataclasses.replace(self, **kwargs)

    def resolved(self) -> 'ScenarioConfig':
        """
        The same configuration with ``flow_direction`` and the reference time ``T`` filled in.

        Examples::
            >>> from flowlab.entry import ScenarioConfig
            >>> ScenarioConfig(background='cigar').resolved().flow_direction
            'static'
        """
        cfg = self
        if cfg.flow_direction is None:
            cfg = cfg.with_(flow_direction='ricci' if cfg.background in _FLOWING_KINDS else 'static')
        if cfg.T is None:
            if cfg.background == 'round_sphere' and cfg.flow_direction == 'ricci':
                cfg = cfg.with_(T=cfg.rho0 ** 2 / 2)
            else:
                cfg = cfg.with_(T=cfg.t1 + 1.0)
        return cfg

    def to_dict(self) -> Dict[str, Any]:
        data = dataclasses.asdict(self)
        data['dims'] = list(self.dims)
        return data


@dataclass(frozen=True)
class ScenarioResult:
    scenario: str
    records: tuple
    csv_path: str
    json_path: str


def initial_conformal_factor(cfg: ScenarioConfig) -> ConformalTorus:
    """
    Seeded low-mode conformal factor ``phi = a * mean_k cos(k . x + s_k)`` on the torus grid.
    """
    rng = np.random.default_rng(cfg.seed)
    modes = np.array([[1, 0], [0, 1], [1, 1], [2, -1]])
    shifts = rng.uniform(0.0, 2 * math.pi, len(modes))
    weights = rng.uniform(0.5, 1.0, len(modes))
    wavenumber = 2 * math.pi / cfg.period

    def _phi(x, y):
        waves = [w * np.cos(wavenumber * (k[0] * x + k[1] * y) + s) for k, s, w in zip(modes, shifts, weights)]
        return cfg.phi_amplitude * sum(waves) / np.sum(weights)

    return ConformalTorus.from_function(_phi, cfg.grid_n, L_x=cfg.period, L_y=cfg.period, t=cfg.t0)


def _grid_ambient(cfg: ScenarioConfig, silent: bool) -> FlowTrajectory:
    flow_cfg = AmbientFlowConfig(Q_mode=cfg.flow_direction, K_mode=cfg.K_mode, T=cfg.T, t_range=(cfg.t0, cfg.t1),
                                 dt=cfg.dt, snapshot_stride=cfg.snapshot_stride)
    traj = ricci_flow_run(initial_conformal_factor(cfg), flow_cfg, silent=silent)
    if cfg.u == 'terminal_bump':
        u_T = terminal_bump(traj[-1].metric, cfg.u_amplitude)
    elif cfg.u == 'constant':
        u_T = cfg.u_constant
    else:
        raise ValidationError(f'Density {cfg.u!r} is not available on torus grids, '
                              f'use \'terminal_bump\' or \'constant\'.')
    return conjugate_heat_solve(traj, u_T, silent=silent)


def _exact_ambient(cfg: ScenarioConfig) -> FlowTrajectory:
    background = AnalyticBackground(cfg.background, rho0=cfg.rho0, flow_direction=cfg.flow_direction,
                                    period=cfg.period)
    traj = exact_family(background, (cfg.t0, cfg.t1), cfg.n_snapshots, cfg.T, cfg.K_mode)
    k_sign = traj.config.k_sign

    if cfg.u == 'constant':
        return conjugate_heat_solve(traj, cfg.u_constant)
    elif cfg.u in ('soliton', 'scalar_curvature'):
        if background.kind != 'round_sphere' or background.sign == 0:
            raise ValidationError(f'Density {cfg.u!r} needs a moving round sphere, '
                                  f'but {background.kind!r} flowing by {background.flow_direction!r} found.')
        if k_sign != background.sign:
            raise ValidationError(f'Density {cfg.u!r} solves the conjugate equation with K = {background.sign:+d} * R, '
                                  f'but K_mode {cfg.K_mode!r} gives {k_sign:+d} * R.')
        C = cfg.u_constant if cfg.u == 'soliton' else 1.0
        return attach_exact_u(traj, families.soliton_density, (C, background.T_ext, float(background.sign)))
    elif cfg.u == 'flat_heat_mode':
        if background.kind not in ('flat_torus', 'flat_plane'):
            raise ValidationError(f'Density \'flat_heat_mode\' needs a flat background, but {background.kind!r} found.')
        return attach_exact_u(traj, families.flat_heat_mode, (cfg.u_amplitude, cfg.T))
    elif cfg.u == 'gaussian':
        if background.kind != 'gaussian_expander':
            raise ValidationError(f'Density \'gaussian\' needs the Gaussian expander, but {background.kind!r} found.')
        return attach_exact_u(traj, families.gaussian_density, (background.T_ext,))
    else:
        raise ValidationError(f'Density {cfg.u!r} is only available on torus grids.')


def build_ambient(cfg: ScenarioConfig, silent: bool = True) -> FlowTrajectory:
    """
    Ambient trajectory carrying ``u`` described by a resolved configuration.
    """
    if cfg.background == 'conformal_torus':
        return _grid_ambient(cfg, silent)
    else:
        return _exact_ambient(cfg)


def build_curve(cfg: ScenarioConfig) -> CurveState:
    torus_like = cfg.background in ('conformal_torus', 'flat_torus')
    if cfg.curve == 'circle':
        center = (cfg.period / 2, cfg.period / 2) if torus_like else (0.0, 0.0)
        return CurveState.circle(cfg.curve_radius, cfg.curve_vertices, center=center, t=cfg.t0)
    elif cfg.curve == 'latitude':
        if cfg.background != 'round_sphere':
            raise ValidationError(f'Latitude curves live on the round sphere, but {cfg.background!r} found.')
        return CurveState.latitude(cfg.curve_theta, cfg.curve_vertices, t=cfg.t0)
    else:
        if not torus_like:
            raise ValidationError(f'Straight loops live on tori, but {cfg.background!r} found.')
        return CurveState.straight_loop(cfg.curve_offset, cfg.period, cfg.curve_vertices, t=cfg.t0)


def build_bundle(cfg: ScenarioConfig, silent: bool = True) -> RunBundle:
    """
    Ambient trajectory, density and curve flow of a resolved configuration.

    :raises CurveCollapse: When the curve collapses before three records are taken.
    """
    traj = build_ambient(cfg, silent)
    curves = curve_flow_run(traj, build_curve(cfg), exact_reduction=cfg.exact_reduction,
                            dt_factor=cfg.curve_dt_factor, silent=silent)
    if curves.collapsed and len(curves) < 3:
        raise CurveCollapse(f'Curve collapsed after {plural_word(len(curves), "record")}.', t=curves.collapse_time)
    return RunBundle(traj, curves, cfg.T)


def _identity_scenario(cfg: ScenarioConfig, silent: bool) -> Tuple[List[IdentityRecord], Dict[str, float]]:
    records = run_identity_suite(cfg.dims, cfg.n_metrics, cfg.n_points, cfg.seed, silent=silent)
    return records, {name: threshold_of(name) for name in CHECK_NAMES}


def _flow_scenario(cfg: ScenarioConfig, silent: bool) -> Tuple[List[IdentityRecord], Dict[str, float]]:
    traj = build_ambient(cfg, silent)
    records: List[IdentityRecord] = []
    q_mode = traj.config.Q_mode
    h_mode = q_mode in H_MODES and traj.config.K_mode != 'zero'
    for index in range(1, len(traj) - 1):
        t = float(traj.times[index])
        residuals = check_flow_evolutions(traj, t=t)
        records.extend([
            IdentityRecord('ricci_evolution', 2, index, residuals.ricci),
            IdentityRecord('scalar_evolution', 2, index, residuals.scalar),
            IdentityRecord('christoffel_evolution', 2, index, residuals.christoffel),
        ])
        if h_mode:
            records.append(IdentityRecord('h_evolution', 2, index, check_H_evolution(traj, t=t, mode=q_mode).residual))

    if traj.is_compact:
        masses = mass_integral(traj)
        drift = np.abs(masses - masses[0]) / abs(masses[0])
        records.extend(IdentityRecord('mass_drift', 2, i, float(value)) for i, value in enumerate(drift))
    else:
        logging.info(f'Mass drift skipped on the noncompact {cfg.background!r} ambient.')
    return records, dict(FLOW_THRESHOLDS)


def _monotonicity_scenario(cfg: ScenarioConfig, silent: bool):
    records = monotonicity_balance(build_bundle(cfg, silent))
    threshold = NUMERIC_BALANCE_THRESHOLD if cfg.background == 'conformal_torus' else EXACT_BALANCE_THRESHOLD
    return records, {'relative_residual': threshold}


def _vertex_samples(cfg: ScenarioConfig, count: int) -> np.ndarray:
    return np.unique(np.linspace(0, cfg.curve_vertices, count, endpoint=False).astype(int))


def _harnack_scenario(cfg: ScenarioConfig, silent: bool) -> Tuple[List[HarnackSample], Dict[str, float]]:
    bundle = build_bundle(cfg, silent)
    q_mode = bundle.ambient.config.Q_mode
    rng = np.random.default_rng(cfg.seed)
    samples: List[HarnackSample] = []
    dim2_skipped = False
    for index in range(len(bundle)):
        curve = bundle.curve_at(index)
        t, tau = float(curve.t), bundle.tau(float(curve.t))
        vertices = _vertex_samples(cfg, min(cfg.harnack_vertices, len(curve)))
        points, normals = curve.vertices[vertices], curve.normal[vertices]
        lyh = harnack_trace_along(bundle.u_at(index), curve, tau, q_mode)[vertices]
        samples.extend(HarnackSample((float(p[0]), float(p[1])), t, tau, 'lyh_trace', tuple(map(float, nu)),
                                     float(v)) for p, nu, v in zip(points, normals, lyh))

        metric = curve.metric
        if isinstance(metric, ConformalTorus):
            nodes = rng.integers(0, metric.n_x, (cfg.harnack_vertices, 2))
            directions = np.zeros((len(nodes), 2))
            directions[:, 0] = np.exp(-metric.phi[nodes[:, 0], nodes[:, 1]])
            points = nodes * np.array(metric.spacing)
            probes = nodes
        else:
            directions, probes = normals, points
        transport = np.zeros_like(directions)

        matrix = np.atleast_1d(harnack_matrix(metric, probes, directions, transport, tau))
        samples.extend(HarnackSample((float(p[0]), float(p[1])), t, tau, 'matrix_4_2', tuple(map(float, v)),
                                     float(value), transport=(0.0, 0.0))
                       for p, v, value in zip(points, directions, matrix))
        if isinstance(metric, ConformalTorus):
            positive = GridGeometry(metric).scalar[probes[:, 0], probes[:, 1]] > 0
            if not np.all(positive):
                dim2_skipped = True
            probes, points, directions = probes[positive], points[positive], directions[positive]
            if len(probes) == 0:
                continue
        try:
            dim2 = np.atleast_1d(dim2_harnack(metric, probes, directions, tau))
        except NonpositiveCurvature as err:
            dim2_skipped = True
            logging.debug(f'2D Harnack form skipped at t={t!r} - {err}')
        else:
            samples.extend(HarnackSample((float(p[0]), float(p[1])), t, tau, 'dim2', tuple(map(float, v)),
                                         float(value)) for p, v, value in zip(points, directions, dim2))

    if dim2_skipped:
        logging.warning('Scalar curvature is not positive somewhere, the 2D Harnack form was skipped there.')
    return samples, {}


def soliton_samples(n_samples: int, seed: int = 0) -> List[IdentityRecord]:
    """
    Random admissible ``(kind, m, n, t, T, T_ext)`` samples of the soliton trace term. The residual of a
    sample is the positive part of the term, i.e. its violation of the sign contract. Every tenth
    shrinking sample takes ``T = T_max``.
    """
    rng = np.random.default_rng(seed)
    records = []
    for i in range(n_samples):
        kind = SOLITON_KINDS[i % len(SOLITON_KINDS)]
        m = int(rng.integers(2, 7))
        n = int(rng.integers(1, m))
        if kind == 'expanding':
            T_ext = float(rng.uniform(-2.0, 0.0))
            t = T_ext + float(rng.uniform(0.01, 2.0))
            T = t + float(rng.uniform(0.01, 2.0))
        elif kind == 'steady':
            T_ext = None
            t = float(rng.uniform(-1.0, 1.0))
            T = t + float(rng.uniform(0.01, 2.0))
        else:
            T_ext = float(rng.uniform(0.5, 3.0))
            T = T_ext if (i // len(SOLITON_KINDS)) % 10 == 0 else T_ext - float(rng.uniform(0.0, 1.0))
            t = min(T, T_ext) - float(rng.uniform(0.01, 2.0))
        value = soliton_trace_term(kind, m, n, t, T, T_ext)
        records.append(IdentityRecord(f'soliton_{kind}', m, i, max(value, 0.0)))
    return records


def _soliton_scenario(cfg: ScenarioConfig, silent: bool) -> Tuple[List[IdentityRecord], Dict[str, float]]:
    return soliton_samples(cfg.n_samples, cfg.seed), {f'soliton_{kind}': 0.0 for kind in SOLITON_KINDS}


_DISPATCH = {
    'verify-identities': _identity_scenario,
    'run-flow': _flow_scenario,
    'monotonicity': _monotonicity_scenario,
    'harnack': _harnack_scenario,
    'solitons': _soliton_scenario,
}


def run_scenario(cfg: ScenarioConfig, out_dir: Optional[str] = None, silent: bool = True) -> ScenarioResult:
    """
    Run a scenario and write its CSV report and JSON summary.

    :param cfg: Scenario configuration.
    :type cfg: ScenarioConfig
    :param out_dir: Report directory, ``cfg.output`` when omitted.
    :type out_dir: Optional[str]
    :param silent: Hide the progress bars. (default: ``True``)
    :type silent: bool
    :returns: Records and report paths.
    :rtype: ScenarioResult
    :raises ValidationError: On invalid configurations.
    :raises NumericalFailure: When a run leaves its domain of validity.

    Examples::
        >>> import tempfile
        >>> from flowlab.entry import ScenarioConfig, run_scenario
        >>> with tempfile.TemporaryDirectory() as td:
        ...     result = run_scenario(ScenarioConfig(scenario='solitons', n_samples=30), td)
        ...     len(result.records)
        30
    """
    cfg = cfg.resolved()
    out_dir = out_dir or cfg.output
    logging.info(f'Running scenario {cfg.scenario!r} with seed {cfg.seed!r}.')
    records, thresholds = _DISPATCH[cfg.scenario](cfg, silent)
    csv_path, json_path = emit_report(records, out_dir, cfg.scenario, config=cfg.to_dict(), seed=cfg.seed,
                                      thresholds=thresholds)
    return ScenarioResult(cfg.scenario, tuple(records), csv_path, json_path)
