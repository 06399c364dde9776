import numpy as np
import pytest

from flowlab.geometry import ConformalTorus, conformal_scalar_curvature, conformal_scalar_curvature_exact, \
    laplace_beltrami, GridScalarField
from flowlab.utils import ValidationError, GridMismatch
from flowlab.utils.dual import jnp


def _bump(x, y):
    return 0.1 * np.sin(x) + 0.05 * np.cos(2 * y)


@pytest.mark.unittest
class TestGeometryTorus:
    def test_flat(self):
        torus = ConformalTorus(np.zeros((32, 32)))
        assert np.allclose(conformal_scalar_curvature(torus), 0.0)
        assert torus.h_x == pytest.approx(2 * np.pi / 32)
        assert np.allclose(torus.metric_tensor(np.array([[0.3, 1.7]])), np.eye(2))

    def test_invalid_grid(self):
        with pytest.raises(ValidationError):
            ConformalTorus(np.zeros((8, 8)))
        with pytest.raises(ValidationError):
            ConformalTorus(np.zeros((33, 32)))
        with pytest.raises(ValidationError):
            ConformalTorus(np.full((32, 32), np.nan))

    def test_scalar_curvature(self):
        torus = ConformalTorus.from_function(lambda x, y: 0.1 * np.sin(x), 256)
        assert conformal_scalar_curvature(torus, (64, 0)) == pytest.approx(0.2 * np.exp(-0.2), rel=1e-4)

    def test_scalar_curvature_against_exact(self):
        torus = ConformalTorus.from_function(_bump, 128)
        x, y = torus.coordinates
        points = np.stack([x.ravel(), y.ravel()], axis=-1)
        exact = conformal_scalar_curvature_exact(
            lambda p: 0.1 * jnp.sin(p[0]) + 0.05 * jnp.cos(2 * p[1]), points).reshape(x.shape)
        assert np.max(np.abs(conformal_scalar_curvature(torus) - exact)) < 1e-3

    def test_gauss_bonnet(self):
        torus = ConformalTorus.from_function(_bump, 64)
        total = np.sum(conformal_scalar_curvature(torus) * torus.conformal_weight) * torus.h_x * torus.h_y
        assert abs(total) < 1e-10

    def test_interpolated_curvature(self):
        torus = ConformalTorus.from_function(_bump, 128)
        points = np.array([[0.37, 1.21], [4.0, 5.5]])
        exact = conformal_scalar_curvature_exact(lambda p: 0.1 * jnp.sin(p[0]) + 0.05 * jnp.cos(2 * p[1]), points)
        assert np.allclose(torus.scalar_curvature(points), exact, atol=1e-5)

    def test_laplace_beltrami(self):
        torus = ConformalTorus.from_function(lambda x, y: 0.2 * np.cos(y), 128)
        x, y = torus.coordinates
        values = laplace_beltrami(torus, np.sin(x))
        assert np.allclose(values, -np.sin(x) * np.exp(-0.4 * np.cos(y)), atol=1e-3)

        with pytest.raises(GridMismatch):
            laplace_beltrami(torus, np.zeros((64, 64)))

    def test_grid_field(self):
        torus = ConformalTorus.from_function(_bump, 64)
        x, _ = torus.coordinates
        field = GridScalarField(torus, 1.5 + np.cos(x))
        assert field.value(np.array([[0.0, 0.0]]))[0] == pytest.approx(2.5, rel=1e-6)

        with pytest.raises(GridMismatch):
            torus.check_same_grid(ConformalTorus(np.zeros((32, 32))))
