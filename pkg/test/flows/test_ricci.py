import numpy as np
import pytest

from flowlab.flows import AmbientFlowConfig, ricci_flow_run, sphere_family, exact_family, potential_sign
from flowlab.geometry import ConformalTorus, AnalyticBackground
from flowlab.utils import StabilityViolation, InvalidTimeOrdering, NonpositiveTau, ValidationError, TimeOutOfRange


def _torus(n: int = 32) -> ConformalTorus:
    return ConformalTorus.from_function(lambda x, y: 0.05 * np.sin(x) + 0.03 * np.cos(y), n)


@pytest.mark.unittest
class TestFlowsConfig:
    def test_potential_sign(self):
        assert potential_sign('scalar_curvature', 'ricci') == 1
        assert potential_sign('scalar_curvature', 'static') == 1
        assert potential_sign('scalar_curvature', 'backward_ricci') == -1
        assert potential_sign('trace_Q', 'backward_ricci') == -1
        assert potential_sign('trace_Q', 'static') == 0
        assert potential_sign('zero', 'ricci') == 0
        with pytest.raises(ValidationError):
            potential_sign('laplacian', 'ricci')

    def test_validation(self):
        with pytest.raises(InvalidTimeOrdering):
            AmbientFlowConfig(t_range=(0.5, 0.1))
        with pytest.raises(NonpositiveTau):
            AmbientFlowConfig(T=0.5, t_range=(0.0, 0.5))
        with pytest.raises(ValidationError):
            AmbientFlowConfig(dt=0.0)
        with pytest.raises(ValidationError):
            AmbientFlowConfig(snapshot_stride=0)
        with pytest.raises(ValidationError):
            AmbientFlowConfig(Q_mode='mean_curvature')

    def test_steps(self):
        cfg = AmbientFlowConfig(t_range=(0.0, 0.1), dt=0.03)
        assert cfg.n_steps == 4
        assert cfg.effective_dt == pytest.approx(0.025)
        assert cfg.tau(0.25) == pytest.approx(0.75)
        assert cfg.with_(dt=0.05).n_steps == 2


@pytest.mark.unittest
class TestFlowsRicci:
    def test_snapshots(self):
        traj = ricci_flow_run(_torus(), AmbientFlowConfig('ricci', T=1.0, t_range=(0.0, 0.1), dt=1e-3,
                                                          snapshot_stride=10))
        assert len(traj) == 11
        assert traj.times[0] == 0.0
        assert traj.times[-1] == pytest.approx(0.1)
        assert traj.provenance == 'numeric'
        assert not traj.has_u
        assert traj.is_compact

    def test_stability(self):
        with pytest.raises(StabilityViolation):
            ricci_flow_run(_torus(), AmbientFlowConfig('ricci', T=1.0, t_range=(0.0, 0.1), dt=0.05))

    def test_flat_stays_flat(self):
        traj = ricci_flow_run(ConformalTorus(np.zeros((32, 32))),
                              AmbientFlowConfig('ricci', T=1.0, t_range=(0.0, 0.05), dt=1e-3, snapshot_stride=25))
        assert np.allclose(traj[-1].metric.phi, 0.0)

    def test_smoothing_and_area(self):
        torus = _torus()
        traj = ricci_flow_run(torus, AmbientFlowConfig('ricci', T=1.0, t_range=(0.0, 0.2), dt=1e-3,
                                                       snapshot_stride=50))
        first, last = traj[0].metric, traj[-1].metric
        assert np.ptp(last.phi) < np.ptp(first.phi)

        def _area(m):
            return np.sum(m.conformal_weight) * m.h_x * m.h_y

        assert _area(last) == pytest.approx(_area(first), rel=1e-4)

    def test_backward_roughens(self):
        traj = ricci_flow_run(_torus(), AmbientFlowConfig('backward_ricci', T=1.0, t_range=(0.0, 0.1), dt=1e-3,
                                                          snapshot_stride=50))
        assert np.ptp(traj[-1].metric.phi) > np.ptp(traj[0].metric.phi)

    def test_metric_at(self):
        traj = ricci_flow_run(_torus(), AmbientFlowConfig('ricci', T=1.0, t_range=(0.0, 0.1), dt=1e-3,
                                                          snapshot_stride=50))
        middle = traj.metric_at(0.025)
        assert middle.t == 0.025
        assert np.allclose(middle.phi, 0.5 * (traj[0].metric.phi + traj[1].metric.phi))
        assert traj.index_of(0.05) == 1
        with pytest.raises(TimeOutOfRange):
            traj.index_of(0.07)
        with pytest.raises(TimeOutOfRange):
            traj.metric_at(0.2)


@pytest.mark.unittest
class TestFlowsExact:
    def test_sphere_family(self):
        traj = sphere_family(np.sqrt(2.0), 'ricci', (0.0, 0.5), n_snapshots=3)
        assert traj.config.T == pytest.approx(1.0)
        assert traj.provenance == 'exact'
        assert traj.background.radius_sq(0.5) == pytest.approx(1.0)
        assert np.allclose(traj[-1].metric.scalar_curvature(np.array([[1.0, 0.0]])), 2.0)

    def test_sphere_family_validation(self):
        with pytest.raises(ValidationError):
            sphere_family(1.0, 'backward_ricci', (0.0, 0.5), n_snapshots=3)
        with pytest.raises(TimeOutOfRange):
            sphere_family(np.sqrt(2.0), 'ricci', (0.0, 1.0), n_snapshots=3)
        with pytest.raises(ValidationError):
            sphere_family(1.0, 'ricci', (0.0, 0.1), n_snapshots=1)

    def test_expanding_sphere(self):
        traj = sphere_family(1.0, 'backward_ricci', (0.0, 0.5), n_snapshots=3, T=2.0)
        assert traj.background.T_ext == pytest.approx(-0.5)
        assert traj.background.radius_sq(0.5) == pytest.approx(2.0)

    def test_exact_family(self):
        traj = exact_family(AnalyticBackground('cigar'), (0.0, 1.0), n_snapshots=5, T=2.0)
        assert len(traj) == 5
        assert not traj.is_compact
        assert np.allclose(traj.times, [0.0, 0.25, 0.5, 0.75, 1.0])
