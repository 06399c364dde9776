import json
import os

import numpy as np
import pandas as pd
import pytest

from flowlab.entry import ScenarioConfig, run_scenario, build_ambient, build_curve, build_bundle, soliton_samples, \
    initial_conformal_factor, SCENARIOS
from flowlab.utils import ValidationError, CurveCollapse


@pytest.mark.unittest
class TestEntryScenarioConfig:
    def test_defaults(self):
        cfg = ScenarioConfig()
        assert cfg.scenario == 'monotonicity'
        assert cfg.T is None
        assert cfg.resolved().T == pytest.approx(1.0)
        assert cfg.with_(background='cigar').resolved().T == pytest.approx(1.2)
        assert cfg.with_(T=3).resolved().T == 3.0
        assert set(SCENARIOS) == {'verify-identities', 'run-flow', 'monotonicity', 'harnack', 'solitons'}

    def test_flow_direction_defaults(self):
        assert ScenarioConfig().flow_direction is None
        assert ScenarioConfig().resolved().flow_direction == 'ricci'
        assert ScenarioConfig(background='conformal_torus').resolved().flow_direction == 'ricci'
        assert ScenarioConfig(background='cigar').resolved().flow_direction == 'static'
        assert ScenarioConfig(background='gaussian_expander').resolved().flow_direction == 'static'
        expanding = ScenarioConfig(flow_direction='backward_ricci', T=1.0).resolved()
        assert expanding.flow_direction == 'backward_ricci'
        assert ScenarioConfig(background='cigar', flow_direction='static').resolved().T == pytest.approx(1.2)

    def test_coercion(self):
        cfg = ScenarioConfig(dt=1, dims=[2], T=2)
        assert isinstance(cfg.dt, float)
        assert cfg.dims == (2,)
        assert cfg.to_dict()['dims'] == [2]

    @pytest.mark.parametrize('kwargs', [
        dict(scenario='everything'),
        dict(background='hyperbolic_plane'),
        dict(flow_direction='forward'),
        dict(K_mode='R'),
        dict(dt=0.0),
        dict(dt=float('nan')),
        dict(t0=0.5, t1=0.2),
        dict(grid_n=17),
        dict(grid_n=8),
        dict(seed=-1),
        dict(n_samples=True),
        dict(n_snapshots=2),
        dict(curve_theta=4.0),
        dict(curve_vertices=4),
        dict(u_amplitude=1.0),
        dict(curve_dt_factor=0.5),
        dict(dims=[4]),
        dict(dims='23'),
        dict(rho0='big'),
        dict(exact_reduction='yes'),
        dict(T=float('inf')),
        dict(output=''),
        dict(background='cigar', flow_direction='ricci'),
        dict(background='flat_torus', flow_direction='backward_ricci'),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValidationError):
            ScenarioConfig(**kwargs)

    def test_from_dict(self):
        assert ScenarioConfig.from_dict({'scenario': 'harnack', 'seed': 4}).seed == 4
        with pytest.raises(ValidationError):
            ScenarioConfig.from_dict({'scenario': 'harnack', 'colour': 'red'})
        with pytest.raises(ValidationError):
            ScenarioConfig.from_dict([1, 2])

    def test_from_json(self, tmp_path):
        path = tmp_path / 'cfg.json'
        path.write_text(json.dumps({'scenario': 'solitons', 'n_samples': 12}), encoding='utf-8')
        assert ScenarioConfig.from_json(str(path)).n_samples == 12
        assert ScenarioConfig.from_json('{"t1": 0.3}').t1 == 0.3
        with pytest.raises(ValidationError):
            ScenarioConfig.from_json('{not json')


@pytest.mark.unittest
class TestEntryBuilders:
    def test_initial_conformal_factor(self):
        cfg = ScenarioConfig(background='conformal_torus', grid_n=32, phi_amplitude=0.2, seed=3)
        torus = initial_conformal_factor(cfg)
        assert torus.phi.shape == (32, 32)
        assert np.max(np.abs(torus.phi)) <= 0.2 + 1e-12
        assert np.allclose(torus.phi, initial_conformal_factor(cfg).phi)
        assert not np.allclose(torus.phi, initial_conformal_factor(cfg.with_(seed=4)).phi)

    def test_curves(self):
        assert build_curve(ScenarioConfig()).is_latitude
        circle = build_curve(ScenarioConfig(background='flat_torus', curve='circle', curve_vertices=32))
        assert np.allclose(np.mean(circle.vertices, axis=0), [np.pi, np.pi])
        with pytest.raises(ValidationError):
            build_curve(ScenarioConfig(background='flat_torus', curve='latitude'))
        with pytest.raises(ValidationError):
            build_curve(ScenarioConfig(background='cigar', curve='straight_loop'))

    def test_ambients(self):
        traj = build_ambient(ScenarioConfig(n_snapshots=5).resolved())
        assert traj.has_u and len(traj) == 5

        with pytest.raises(ValidationError):
            build_ambient(ScenarioConfig(background='conformal_torus', u='soliton', grid_n=16, t1=0.01,
                                         dt=1e-3).resolved())
        with pytest.raises(ValidationError):
            build_ambient(ScenarioConfig(background='cigar', u='soliton').resolved())
        with pytest.raises(ValidationError):
            build_ambient(ScenarioConfig(K_mode='zero').resolved())
        with pytest.raises(ValidationError):
            build_ambient(ScenarioConfig(background='cigar', u='gaussian').resolved())

    def test_collapse(self):
        cfg = ScenarioConfig(background='flat_plane', curve='circle', curve_radius=0.1, curve_vertices=32,
                             u='constant', n_snapshots=21)
        with pytest.raises(CurveCollapse):
            build_bundle(cfg.resolved())

    def test_soliton_samples(self):
        records = soliton_samples(60, seed=2)
        assert len(records) == 60
        assert {r.check_name for r in records} == {'soliton_expanding', 'soliton_steady', 'soliton_shrinking'}
        assert all(r.residual == 0.0 for r in records)
        assert all(r.dim >= 2 for r in records)
        assert records == soliton_samples(60, seed=2)


@pytest.mark.unittest
class TestEntryRunScenario:
    def test_solitons(self, tmp_path):
        result = run_scenario(ScenarioConfig(scenario='solitons', n_samples=30, seed=5), str(tmp_path))
        assert result.scenario == 'solitons'
        assert len(result.records) == 30
        assert result.csv_path == os.path.join(str(tmp_path), 'solitons.csv')

        df = pd.read_csv(result.csv_path)
        assert list(df.columns) == ['check_name', 'dim', 'point_index', 'residual']
        assert len(df) == 30

        with open(result.json_path, 'r', encoding='utf-8') as f:
            summary = json.load(f)
        assert summary['passed']
        assert summary['seed'] == 5
        assert summary['kind'] == 'identity'
        assert summary['config']['n_samples'] == 30

    def test_deterministic(self, tmp_path):
        cfg = ScenarioConfig(scenario='solitons', n_samples=20, seed=9)
        first = run_scenario(cfg, str(tmp_path / 'a'))
        second = run_scenario(cfg, str(tmp_path / 'b'))
        with open(first.csv_path, 'rb') as f1, open(second.csv_path, 'rb') as f2:
            assert f1.read() == f2.read()

    def test_monotonicity(self, tmp_path):
        result = run_scenario(ScenarioConfig(scenario='monotonicity', curve_vertices=128), str(tmp_path))
        df = pd.read_csv(result.csv_path)
        assert list(df.columns) == ['t', 'tau', 'theta', 'dtheta_dt', 'termA', 'termB', 'termC', 'residual']
        assert len(df) == 21
        assert np.all(df['dtheta_dt'] < 0)
        with open(result.json_path, 'r', encoding='utf-8') as f:
            summary = json.load(f)
        assert summary['passed']
        assert summary['checks']['relative_residual']['threshold'] == 1e-2

    def test_harnack(self, tmp_path):
        result = run_scenario(ScenarioConfig(scenario='harnack', n_snapshots=3, curve_vertices=64,
                                             harnack_vertices=8), str(tmp_path))
        df = pd.read_csv(result.csv_path)
        assert list(df.columns) == ['t', 'point_x', 'point_y', 'kind', 'value']
        assert set(df['kind']) == {'lyh_trace', 'matrix_4_2', 'dim2'}
        assert np.allclose(df[df['kind'] == 'lyh_trace']['value'], 0.0, atol=1e-10)
        assert np.all(df[df['kind'] == 'matrix_4_2']['value'] > 0)

    def test_harnack_torus(self, tmp_path):
        # the total curvature of a torus vanishes, so R takes both signs on the grid
        cfg = ScenarioConfig(scenario='harnack', background='conformal_torus', u='terminal_bump', curve='circle',
                             grid_n=32, dt=1e-3, t1=0.02, snapshot_stride=10, curve_vertices=64,
                             harnack_vertices=32, phi_amplitude=0.2)
        result = run_scenario(cfg, str(tmp_path))
        df = pd.read_csv(result.csv_path)
        assert set(df['kind']) == {'lyh_trace', 'matrix_4_2', 'dim2'}
        dim2 = df[df['kind'] == 'dim2']
        assert 0 < len(dim2) < len(df[df['kind'] == 'matrix_4_2'])
        assert np.all(np.isfinite(dim2['value']))

    def test_run_flow_sphere(self, tmp_path):
        result = run_scenario(ScenarioConfig(scenario='run-flow', n_snapshots=5), str(tmp_path))
        names = {r.check_name for r in result.records}
        assert names == {'ricci_evolution', 'scalar_evolution', 'christoffel_evolution', 'h_evolution', 'mass_drift'}
        assert max(r.residual for r in result.records if r.check_name == 'mass_drift') < 1e-8

    def test_run_flow_torus(self, tmp_path):
        cfg = ScenarioConfig(scenario='run-flow', background='conformal_torus', u='terminal_bump', grid_n=32,
                             dt=1e-3, t1=0.02, snapshot_stride=5)
        result = run_scenario(cfg, str(tmp_path))
        drift = [r.residual for r in result.records if r.check_name == 'mass_drift']
        assert len(drift) == 5
        assert max(drift) < 1e-3
