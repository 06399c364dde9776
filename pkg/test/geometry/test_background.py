import numpy as np
import pytest

from flowlab.geometry import AnalyticBackground, background_eval, direction_sign
from flowlab.utils import ValidationError, TimeOutOfRange


@pytest.mark.unittest
class TestGeometryBackground:
    def test_direction_sign(self):
        assert direction_sign('ricci') == 1
        assert direction_sign('backward_ricci') == -1
        assert direction_sign('static') == 0
        with pytest.raises(ValidationError):
            direction_sign('sideways')

    def test_sphere_extremal_time(self):
        shrinking = AnalyticBackground('round_sphere', rho0=np.sqrt(2.0), flow_direction='ricci')
        assert shrinking.T_ext == pytest.approx(1.0)
        expanding = AnalyticBackground('round_sphere', rho0=np.sqrt(2.0), flow_direction='backward_ricci')
        assert expanding.T_ext == pytest.approx(-1.0)
        assert AnalyticBackground('round_sphere').T_ext is None

        with pytest.raises(ValidationError):
            AnalyticBackground('round_sphere', rho0=1.0, T_ext=2.0, flow_direction='ricci')

    def test_invalid(self):
        with pytest.raises(ValidationError):
            AnalyticBackground('klein_bottle')
        with pytest.raises(ValidationError):
            AnalyticBackground('round_sphere', rho0=-1.0)
        with pytest.raises(ValidationError):
            AnalyticBackground('cigar', T_ext=1.0)

    def test_frozen_backgrounds(self):
        assert AnalyticBackground('cigar').flow_direction == 'static'
        for kind in ('flat_plane', 'flat_torus', 'cigar', 'gaussian_expander'):
            with pytest.raises(ValidationError):
                AnalyticBackground(kind, flow_direction='ricci')
            with pytest.raises(ValidationError):
                AnalyticBackground(kind, flow_direction='backward_ricci')
        assert AnalyticBackground('gaussian_expander').T_ext == 0.0
        assert AnalyticBackground('flat_torus').is_compact
        assert not AnalyticBackground('cigar').is_compact

    def test_radius(self):
        b = AnalyticBackground('round_sphere', rho0=np.sqrt(2.0), flow_direction='ricci')
        assert b.radius_sq(0.5) == pytest.approx(1.0)
        b.check_time(0.9)
        with pytest.raises(TimeOutOfRange):
            b.check_time(1.0)

    def test_sphere_curvature(self):
        b = AnalyticBackground('round_sphere', rho0=np.sqrt(2.0), flow_direction='ricci')
        points = np.array([[0.5, 0.0], [1.0, 2.0], [2.5, 4.0]])
        assert np.allclose(b.at(0.5).scalar_curvature(points), 2.0)
        assert np.allclose(b.at(0.0).scalar_curvature(points), 1.0)

    def test_shrinking_soliton_equation(self):
        b = AnalyticBackground('round_sphere', rho0=np.sqrt(2.0), flow_direction='ricci')
        v = background_eval(b, np.array([[1.0, 0.5], [2.0, 1.0]]), 0.25)
        assert np.allclose(v.ddf + v.Ric - v.g / (2 * (b.T_ext - 0.25)), 0.0, atol=1e-10)

    def test_cigar_soliton_equation(self):
        b = AnalyticBackground('cigar')
        v = background_eval(b, np.array([[0.3, -0.2], [1.0, 0.5]]), 0.0)
        # steady gradient soliton, Ric + Hess f = 0
        assert np.allclose(v.Ric + v.ddf, 0.0, atol=1e-10)
        assert v.R[0] == pytest.approx(4 / (1 + 0.3 ** 2 + 0.2 ** 2))
