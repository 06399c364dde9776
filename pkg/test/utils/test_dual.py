import numpy as np
import pytest

from flowlab.utils.dual import jnp, spatial_derivative, time_derivative, to_numpy


@pytest.mark.unittest
class TestUtilsDual:
    def test_spatial_derivative(self):
        def field(x, t):
            return jnp.stack([x[0] ** 2 * x[1], jnp.sin(x[1]) * t])

        d = to_numpy(spatial_derivative(field)(jnp.array([2.0, 0.5]), 3.0))
        assert d.shape == (2, 2)
        assert d[0] == pytest.approx([2 * 2.0 * 0.5, 0.0])
        assert d[1] == pytest.approx([2.0 ** 2, np.cos(0.5) * 3.0])

    def test_time_derivative(self):
        def field(x, t):
            return jnp.exp(-t) * x

        dt = to_numpy(time_derivative(field)(jnp.array([1.0, 2.0]), 0.0))
        assert dt == pytest.approx([-1.0, -2.0])

    def test_double_precision(self):
        assert to_numpy(jnp.array([1.0])).dtype == np.float64
        assert jnp.array([1.0]).dtype == jnp.float64
