import numpy as np
import pytest

from flowlab.flows import AmbientFlowConfig, exact_family, sphere_family, curve_flow_run, ricci_flow_run
from flowlab.geometry import AnalyticBackground, CurveState, ConformalTorus, curve_integral
from flowlab.utils import ValidationError, InvalidTimeOrdering


@pytest.mark.unittest
class TestFlowsCurve:
    def test_shrinking_circle(self):
        ambient = exact_family(AnalyticBackground('flat_plane'), (0.0, 0.2), n_snapshots=5, T=1.0)
        curves = curve_flow_run(ambient, CurveState.circle(1.0, 128))
        assert not curves.collapsed
        assert np.allclose(curves.times, ambient.times)
        assert np.allclose(curves.lengths / (2 * np.pi), np.sqrt(1 - 2 * curves.times), rtol=1e-3)

    def test_great_circle_is_stationary(self):
        ambient = sphere_family(1.0, 'static', (0.0, 0.2), n_snapshots=3, T=1.0)
        curves = curve_flow_run(ambient, CurveState.latitude(np.pi / 2, 64))
        assert np.allclose(curves[-1].vertices[:, 0], np.pi / 2)

    def test_latitude_reduction(self):
        ambient = sphere_family(np.sqrt(2.0), 'ricci', (0.0, 0.2), n_snapshots=5)
        gamma0 = CurveState.latitude(np.pi / 4, 64)
        exact = curve_flow_run(ambient, gamma0)
        polyline = curve_flow_run(ambient, gamma0, exact_reduction=False)
        assert exact[-1].is_latitude
        assert exact[-1].vertices[0, 0] < np.pi / 4
        assert np.allclose(np.mean(polyline[-1].vertices[:, 0]), exact[-1].vertices[0, 0], atol=2e-3)

    def test_t_range(self):
        ambient = exact_family(AnalyticBackground('flat_plane'), (0.0, 0.2), n_snapshots=5, T=1.0)
        curves = curve_flow_run(ambient, CurveState.circle(1.0, 64), t_range=(0.05, 0.15))
        assert np.allclose(curves.times, [0.05, 0.1, 0.15])
        with pytest.raises(InvalidTimeOrdering):
            curve_flow_run(ambient, CurveState.circle(1.0, 64), t_range=(0.15, 0.05))
        with pytest.raises(ValidationError):
            curve_flow_run(ambient, CurveState.circle(1.0, 64), t_range=(0.01, 0.02))
        with pytest.raises(ValidationError):
            curve_flow_run(ambient, CurveState.circle(1.0, 64), dt_factor=0.5)

    def test_collapse(self):
        ambient = exact_family(AnalyticBackground('flat_plane'), (0.0, 0.01), n_snapshots=11, T=1.0)
        curves = curve_flow_run(ambient, CurveState.circle(0.1, 32))
        assert curves.collapsed
        assert curves.collapse_time == pytest.approx(0.005, abs=5e-4)
        assert len(curves) <= 6
        assert np.all(curves.lengths > 0)

    def test_length_law_on_torus(self):
        # dL/dt = -int k^2 ds - int R / 2 ds under Ricci flow
        torus = ConformalTorus.from_function(lambda x, y: 0.2 * np.sin(x), 32)
        ambient = ricci_flow_run(torus, AmbientFlowConfig('ricci', T=1.0, t_range=(0.0, 0.04), dt=2e-3,
                                                          snapshot_stride=5))
        curves = curve_flow_run(ambient, CurveState.circle(1.0, 128, center=(np.pi / 2, np.pi)))
        assert not curves.collapsed
        assert len(curves) == 5

        rates = np.gradient(curves.lengths, curves.times)
        for index in range(1, len(curves) - 1):
            c = curves[index]
            shortening = curve_integral(c, c.frame.k ** 2)
            ambient_term = curve_integral(c, c.metric.scalar_curvature(c.vertices) / 2)
            assert ambient_term > 0.05 * shortening
            assert rates[index] == pytest.approx(-shortening - ambient_term, rel=2e-2)
