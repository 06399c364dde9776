import numpy as np
import pytest

from flowlab.tensorlab import check_commutation, check_bianchi, check_hessian_laplacian_interchange, \
    check_curvature_symmetries, check_two_dimensional_curvature, random_trig_metric, random_trig_covector, \
    random_trig_two_form, random_trig_scalar, conformal_trig_metric, AnalyticMetricDim, families
from flowlab.utils import ValidationError


def _points(dim: int, n: int = 4, seed: int = 0) -> np.ndarray:
    return np.random.default_rng(seed).uniform(0.0, 2 * np.pi, (n, dim))


@pytest.mark.unittest
class TestTensorlabIdentities:
    @pytest.mark.parametrize('dim', [2, 3])
    def test_commutation(self, dim):
        g = random_trig_metric(dim, seed=5)
        assert np.max(check_commutation(g, random_trig_covector(dim, 6), _points(dim))) < 1e-7
        assert np.max(check_commutation(g, random_trig_two_form(dim, 7), _points(dim))) < 1e-7

    def test_commutation_rank(self):
        g = random_trig_metric(2, seed=5)
        with pytest.raises(ValidationError):
            check_commutation(g, random_trig_scalar(2, 6), _points(2))

    @pytest.mark.parametrize('dim', [2, 3])
    def test_bianchi(self, dim):
        residuals = check_bianchi(random_trig_metric(dim, seed=21), _points(dim))
        assert residuals.worst < 1e-7
        assert np.shape(residuals.second) == (4,)

    def test_bianchi_single_point(self):
        residuals = check_bianchi(random_trig_metric(3, seed=21), np.array([0.1, 0.2, 0.3]))
        assert isinstance(residuals.div_ric, float)

    @pytest.mark.parametrize('dim', [2, 3])
    def test_interchange(self, dim):
        g = random_trig_metric(dim, seed=31)
        assert np.max(check_hessian_laplacian_interchange(g, random_trig_scalar(dim, 32), _points(dim))) < 1e-7

    @pytest.mark.parametrize('dim', [2, 3])
    def test_symmetries(self, dim):
        assert np.max(check_curvature_symmetries(random_trig_metric(dim, seed=41), _points(dim))) < 1e-9

    def test_two_dimensional_curvature(self):
        assert np.max(check_two_dimensional_curvature(conformal_trig_metric(seed=3), _points(2))) < 1e-9
        sphere = AnalyticMetricDim(families.round_sphere_metric, (1.0, 0.0))
        assert check_two_dimensional_curvature(sphere, np.array([1.0, 0.5])) < 1e-10

        with pytest.raises(ValidationError):
            check_two_dimensional_curvature(random_trig_metric(3, seed=1), _points(3))
