import numpy as np
import pytest

from flowlab.flows import AmbientFlowConfig, sphere_family, exact_family, attach_exact_u, curve_flow_run, \
    ricci_flow_run, conjugate_heat_solve, terminal_bump
from flowlab.geometry import AnalyticBackground, CurveState, ConformalTorus, midpoint_refine
from flowlab.monitor import RunBundle, theta, monotonicity_balance, dim2_harnack
from flowlab.tensorlab import families
from flowlab.utils import ValidationError, GridMismatch, InsufficientSnapshots, NonpositiveTau


@pytest.fixture(scope='module')
def sphere_soliton_bundle():
    traj = sphere_family(np.sqrt(2.0), 'ricci', (0.0, 0.2), n_snapshots=21)
    traj = attach_exact_u(traj, families.soliton_density, (1.0, 1.0, 1.0))
    return RunBundle(traj, curve_flow_run(traj, CurveState.latitude(1.0, 256)))


@pytest.fixture(scope='module')
def flat_loop_bundle():
    traj = exact_family(AnalyticBackground('flat_torus'), (0.0, 0.2), n_snapshots=11, T=1.0, K_mode='zero')
    traj = attach_exact_u(traj, families.constant_scalar, (2.0,))
    return RunBundle(traj, curve_flow_run(traj, CurveState.straight_loop(1.0, 2 * np.pi, 64)))


@pytest.mark.unittest
class TestMonitorBalance:
    def test_bundle(self, sphere_soliton_bundle):
        bundle = sphere_soliton_bundle
        assert len(bundle) == 21
        assert bundle.T == pytest.approx(1.0)
        assert bundle.tau(0.25) == pytest.approx(0.75)
        assert bundle.curve_at(3).metric is not None
        assert bundle.u_at(3).value(np.array([[1.0, 0.0]]))[0] == pytest.approx(1 / (1 - bundle.times[3]))

    def test_bundle_validation(self):
        traj = exact_family(AnalyticBackground('flat_plane'), (0.0, 0.1), n_snapshots=3, T=1.0)
        curves = curve_flow_run(traj, CurveState.circle(1.0, 64))
        with pytest.raises(ValidationError):
            RunBundle(traj, curves)

        traj = attach_exact_u(traj, families.constant_scalar, (1.0,))
        with pytest.raises(ValidationError):
            RunBundle(traj, curves, m=2, n=2)

        other = exact_family(AnalyticBackground('flat_plane'), (0.0, 0.1), n_snapshots=5, T=1.0)
        with pytest.raises(GridMismatch):
            RunBundle(traj, curve_flow_run(other, CurveState.circle(1.0, 64)))

    def test_theta_flat_circle(self):
        traj = exact_family(AnalyticBackground('flat_plane'), (0.0, 0.01), n_snapshots=3, T=4.0, K_mode='zero')
        traj = attach_exact_u(traj, families.constant_scalar, (1.0,))
        bundle = RunBundle(traj, curve_flow_run(traj, CurveState.circle(1.0, 256)))
        assert theta(bundle, 0.0) == pytest.approx(2 * 2 * np.pi, rel=1e-6)
        assert theta(bundle, 0.0, m=3) == pytest.approx(4 * 2 * np.pi, rel=1e-6)
        with pytest.raises(NonpositiveTau):
            theta(bundle, 0.0, T=0.0)

    def test_sphere_soliton(self, sphere_soliton_bundle):
        records = monotonicity_balance(sphere_soliton_bundle)
        assert len(records) == 21
        for record, state in zip(records, sphere_soliton_bundle.curves):
            latitude = state.vertices[0, 0]
            assert record.theta == pytest.approx(2 * np.sqrt(2) * np.pi * np.sin(latitude), rel=1e-8)
            assert abs(record.termB) < 1e-8
            assert abs(record.termC) < 1e-8
            assert record.termA < 0
            assert record.dtheta_dt < 0
            assert record.relative_residual() < 1e-2
            assert record.lyh_trace.shape == (256,)

    def test_flat_loop(self, flat_loop_bundle):
        records = monotonicity_balance(flat_loop_bundle)
        for record in records:
            assert abs(record.termA) < 1e-10
            assert abs(record.termC) < 1e-10
            assert record.termB == pytest.approx(-2.0 * 2 * np.pi / (2 * np.sqrt(record.tau)), rel=1e-8)
            assert record.relative_residual() < 5e-3

    def test_expanding_sphere_scalar_density(self):
        traj = sphere_family(1.0, 'backward_ricci', (0.0, 0.2), n_snapshots=21, T=1.0, K_mode='scalar_curvature')
        traj = attach_exact_u(traj, families.soliton_density, (1.0, traj.background.T_ext, -1.0))
        bundle = RunBundle(traj, curve_flow_run(traj, CurveState.latitude(1.0, 256)))
        records = monotonicity_balance(bundle)
        for record, state in zip(records, bundle.curves):
            scalar = 2 / traj.background.radius_sq(record.t)
            length = 2 * np.pi * np.sqrt(traj.background.radius_sq(record.t)) * np.sin(state.vertices[0, 0])
            expected = np.sqrt(record.tau) * (-scalar / 2 - 1 / (2 * record.tau)) * scalar * length
            assert record.termB == pytest.approx(expected, rel=1e-6)
            assert abs(record.termC) < 1e-10
            assert record.relative_residual() < 1e-2

    def test_reference_time(self, flat_loop_bundle):
        records = monotonicity_balance(flat_loop_bundle, T=2.0)
        assert records[0].tau == pytest.approx(2.0)

    def test_insufficient(self):
        traj = exact_family(AnalyticBackground('flat_plane'), (0.0, 0.01), n_snapshots=2, T=1.0)
        traj = attach_exact_u(traj, families.constant_scalar, (1.0,))
        bundle = RunBundle(traj, curve_flow_run(traj, CurveState.circle(1.0, 64)))
        with pytest.raises(InsufficientSnapshots):
            monotonicity_balance(bundle)

    def test_flat_circle_heat_mode(self):
        traj = exact_family(AnalyticBackground('flat_torus'), (0.0, 0.05), n_snapshots=11, T=1.0, K_mode='zero')
        traj = attach_exact_u(traj, families.flat_heat_mode, (0.5, 1.0))
        bundle = RunBundle(traj, curve_flow_run(traj, CurveState.circle(1.0, 256, center=(np.pi, np.pi))))
        records = monotonicity_balance(bundle)
        assert len(records) == 11
        for record in records:
            assert abs(record.termC) < 1e-12
            assert record.termA < 0
            assert record.relative_residual() < 1e-2

    def test_theta_refinement(self):
        traj = exact_family(AnalyticBackground('flat_torus'), (0.0, 0.01), n_snapshots=3, T=1.0, K_mode='zero')
        traj = attach_exact_u(traj, families.flat_heat_mode, (0.5, 1.0))
        c = CurveState.circle(1.0, 256, center=(np.pi, np.pi))
        coarse = RunBundle(traj, curve_flow_run(traj, c))
        fine = RunBundle(traj, curve_flow_run(traj, midpoint_refine(c)))
        assert len(fine.curve_at(0)) == 512
        assert theta(fine, 0.0) == pytest.approx(theta(coarse, 0.0), rel=1e-4)

    def test_expanding_sphere_decay(self):
        # u = R on the expanding sphere, the trace term is minus the 2D Harnack form
        traj = sphere_family(1.0, 'backward_ricci', (0.0, 0.2), n_snapshots=21, T=1.0, K_mode='scalar_curvature')
        assert traj.background.T_ext == pytest.approx(-0.5)
        traj = attach_exact_u(traj, families.soliton_density, (1.0, traj.background.T_ext, -1.0))
        bundle = RunBundle(traj, curve_flow_run(traj, CurveState.latitude(1.2, 256)))
        records = monotonicity_balance(bundle)
        assert np.all(np.diff([record.theta for record in records]) < 0)
        for index, record in enumerate(records):
            state = bundle.curve_at(index)
            form = dim2_harnack(state.metric, state.vertices, state.frame.normal, record.tau)
            assert np.all(form > 0)
            assert record.lyh_trace == pytest.approx(-form, rel=1e-8)
            assert record.termB < 0
            assert record.dtheta_dt < 0

    def test_equator_is_stationary(self):
        traj = sphere_family(np.sqrt(2.0), 'ricci', (0.0, 0.2), n_snapshots=11)
        traj = attach_exact_u(traj, families.soliton_density, (1.0, 1.0, 1.0))
        bundle = RunBundle(traj, curve_flow_run(traj, CurveState.latitude(np.pi / 2, 128)))
        for record in monotonicity_balance(bundle):
            assert record.theta == pytest.approx(2 * np.sqrt(2) * np.pi, rel=1e-8)
            for value in (record.termA, record.termB, record.termC, record.dtheta_dt):
                assert abs(value) < 1e-8


def _torus_bundle(n: int, vertices: int, dt: float, stride: int) -> RunBundle:
    torus = ConformalTorus.from_function(lambda x, y: 0.1 * np.sin(x) + 0.05 * np.cos(y), n)
    cfg = AmbientFlowConfig('ricci', T=1.0, t_range=(0.0, 0.04), dt=dt, snapshot_stride=stride)
    traj = ricci_flow_run(torus, cfg)
    traj = conjugate_heat_solve(traj, terminal_bump(traj[-1].metric))
    return RunBundle(traj, curve_flow_run(traj, CurveState.circle(1.0, vertices, center=(np.pi, np.pi))))


@pytest.fixture(scope='module')
def torus_bundles():
    return _torus_bundle(32, 64, 2e-3, 5), _torus_bundle(64, 128, 1e-3, 10)


@pytest.mark.unittest
class TestMonitorBalanceGrid:
    def test_times(self, torus_bundles):
        coarse, fine = torus_bundles
        assert len(coarse) == len(fine) == 5
        assert coarse.times == pytest.approx([0.0, 0.01, 0.02, 0.03, 0.04])
        assert fine.times == pytest.approx(coarse.times)

    def test_balance(self, torus_bundles):
        coarse, fine = (monotonicity_balance(bundle) for bundle in torus_bundles)
        coarse_worst = max(record.relative_residual() for record in coarse)
        fine_worst = max(record.relative_residual() for record in fine)
        assert coarse_worst < 3e-2
        assert fine_worst <= coarse_worst
        for record in coarse + fine:
            assert np.isfinite(record.theta)
            assert record.termA <= 0
            assert abs(record.termC) < 1e-12
