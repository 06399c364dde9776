import numpy as np
import pytest

from flowlab.tensorlab import AnalyticMetricDim, families, christoffel, riemann, covariant_derivatives, \
    random_trig_metric, random_trig_scalar, relative_residual
from flowlab.tensorlab.metric import AnalyticField
from flowlab.utils import SingularMetric, ValidationError


@pytest.fixture()
def unit_sphere():
    return AnalyticMetricDim(families.round_sphere_metric, (1.0, 0.0))


@pytest.mark.unittest
class TestTensorlabCalculus:
    def test_sphere_christoffel(self, unit_sphere):
        theta = 1.0
        gamma = christoffel(unit_sphere, np.array([theta, 0.3])).components
        assert gamma[0, 1, 1] == pytest.approx(-np.sin(theta) * np.cos(theta))
        assert gamma[1, 0, 1] == pytest.approx(np.cos(theta) / np.sin(theta))
        assert gamma[1, 1, 0] == pytest.approx(np.cos(theta) / np.sin(theta))
        assert gamma[0, 0, 0] == pytest.approx(0.0)

    def test_sphere_curvature(self, unit_sphere):
        points = np.array([[0.4, 0.0], [1.0, 1.0], [2.0, 3.0]])
        values = riemann(unit_sphere, points)
        assert np.allclose(values.scalar, 2.0)
        g = np.stack([np.diag([1.0, np.sin(th) ** 2]) for th in points[:, 0]])
        assert np.allclose(values.ric.components, g)

    def test_shrinking_sphere_in_time(self):
        sphere = AnalyticMetricDim(families.round_sphere_metric, (2.0, 1.0))
        assert riemann(sphere, np.array([1.0, 0.0]), t=0.5).scalar == pytest.approx(2.0)

    def test_flat(self):
        flat = AnalyticMetricDim(families.euclidean_metric, (), dim=3)
        values = riemann(flat, np.array([[0.1, 0.2, 0.3]]))
        assert np.allclose(values.riem.components, 0.0)
        assert np.allclose(values.scalar, 0.0)

    def test_covariant_derivatives_flat(self):
        flat = AnalyticMetricDim(families.euclidean_metric, ())
        field = AnalyticField(families.first_squared, (), rank=0)
        first, second = covariant_derivatives(flat, field, np.array([1.5, 0.0]), order=2)
        assert np.allclose(first.components, [3.0, 0.0])
        assert np.allclose(second.components, [[2.0, 0.0], [0.0, 0.0]])

    def test_random_metric(self):
        g = random_trig_metric(3, seed=11)
        assert g.dim == 3 and g.seed == 11
        values = riemann(g, np.random.default_rng(0).uniform(0, 2 * np.pi, (4, 3)))
        assert np.allclose(values.ric.components, np.swapaxes(values.ric.components, -1, -2))

        again = random_trig_metric(3, seed=11)
        assert np.allclose(np.asarray(g.params[2]), np.asarray(again.params[2]))

    def test_singular_metric(self):
        degenerate = AnalyticMetricDim(families.round_sphere_metric, (1.0, 0.0))
        with pytest.raises(SingularMetric):
            christoffel(degenerate, np.array([0.0, 0.0]))

    def test_dimension(self):
        with pytest.raises(ValidationError):
            AnalyticMetricDim(families.euclidean_metric, (), dim=4)
        with pytest.raises(ValidationError):
            riemann(AnalyticMetricDim(families.euclidean_metric, (), dim=3), np.array([0.0, 0.0]))

    def test_relative_residual(self):
        assert relative_residual([1.0, 2.0], [1.0, 2.2]) == pytest.approx(0.2 / 2.2)
        assert relative_residual([0.0], [1e-12]) == pytest.approx(1e-12)
        assert relative_residual([], []) == 0.0

    def test_random_scalar_rank(self):
        assert random_trig_scalar(2, seed=3).rank == 0
