import numpy as np
import pytest

from flowlab.geometry import AnalyticBackground, CurveState, geodesic_curvature, curve_integral, midpoint_refine, \
    resample_uniform
from flowlab.utils import ValidationError, DegenerateCurve


@pytest.fixture()
def flat():
    return AnalyticBackground('flat_plane').at(0.0)


@pytest.fixture()
def unit_sphere():
    return AnalyticBackground('round_sphere', rho0=1.0).at(0.0)


@pytest.mark.unittest
class TestGeometryCurve:
    def test_circle_curvature(self, flat):
        for radius in [0.5, 1.0, 2.0]:
            k, nu = geodesic_curvature(CurveState.circle(radius, 512), flat)
            assert np.allclose(k, 1 / radius, rtol=1e-6)
            assert np.allclose(np.linalg.norm(nu, axis=-1), 1.0)

    def test_circle_normal_points_inwards(self, flat):
        c = CurveState.circle(1.0, 64, metric=flat)
        assert np.allclose(c.normal, -c.vertices, atol=1e-6)

    def test_circle_length(self, flat):
        c = CurveState.circle(1.5, 256, metric=flat)
        assert c.length == pytest.approx(2 * np.pi * 1.5, rel=1e-6)
        assert curve_integral(c, 2.0) == pytest.approx(2 * c.length)

    def test_latitude(self, unit_sphere):
        c = CurveState.latitude(1.0, 256, metric=unit_sphere)
        assert c.is_latitude
        assert c.length == pytest.approx(2 * np.pi * np.sin(1.0), rel=1e-6)
        assert np.allclose(np.abs(c.k), abs(np.cos(1.0) / np.sin(1.0)), rtol=1e-6)

    def test_equator_is_geodesic(self, unit_sphere):
        c = CurveState.latitude(np.pi / 2, 128, metric=unit_sphere)
        assert np.allclose(c.k, 0.0, atol=1e-10)

    def test_straight_loop(self):
        torus = AnalyticBackground('flat_torus').at(0.0)
        c = CurveState.straight_loop(1.0, 2 * np.pi, 64, metric=torus)
        assert c.length == pytest.approx(2 * np.pi)
        assert np.allclose(c.k, 0.0, atol=1e-10)

    def test_invalid(self, flat):
        with pytest.raises(ValidationError):
            CurveState(np.zeros((4, 2)), 0.0)
        with pytest.raises(ValidationError):
            CurveState(np.zeros((16, 3)), 0.0)
        with pytest.raises(ValidationError):
            CurveState.circle(-1.0)
        with pytest.raises(ValidationError):
            CurveState.latitude(0.0)

    def test_degenerate(self, flat):
        vertices = CurveState.circle(1.0, 64).vertices.copy()
        vertices[1] = vertices[0]
        with pytest.raises(DegenerateCurve):
            geodesic_curvature(CurveState(vertices, 0.0, eps_edge=1e-3), flat)

    def test_midpoint_refine(self, flat):
        c = CurveState.circle(1.0, 64, metric=flat)
        refined = midpoint_refine(c)
        assert len(refined) == 128
        assert np.allclose(refined.vertices[0::2], c.vertices)

    def test_resample_uniform(self, flat):
        angles = np.linspace(0, 2 * np.pi, 128, endpoint=False)
        angles = angles + 0.2 * np.sin(angles)
        c = CurveState(np.stack([np.cos(angles), np.sin(angles)], axis=-1), 0.0, metric=flat)
        resampled = resample_uniform(c)
        assert len(resampled) == len(c)
        lengths = resampled.edge_lengths(flat)
        assert np.ptp(lengths) / np.mean(lengths) < 1e-2
        assert resampled.length == pytest.approx(2 * np.pi, rel=1e-4)
