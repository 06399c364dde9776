import numpy as np
import pytest

from flowlab.flows import AmbientFlowConfig, ricci_flow_run, sphere_family, exact_family, conjugate_heat_solve, \
    attach_exact_u, terminal_bump
from flowlab.geometry import ConformalTorus, AnalyticBackground, GridScalarField
from flowlab.tensorlab import families
from flowlab.utils import NonpositiveU, ValidationError, InsufficientSnapshots, StabilityViolation


def _static_flat(t1: float = 0.1) -> object:
    return ricci_flow_run(ConformalTorus(np.zeros((32, 32))),
                          AmbientFlowConfig('static', K_mode='zero', T=1.0, t_range=(0.0, t1), dt=1e-3,
                                            snapshot_stride=50))


@pytest.mark.unittest
class TestFlowsHeat:
    def test_sphere_soliton_density(self):
        traj = conjugate_heat_solve(sphere_family(np.sqrt(2.0), 'ricci', (0.0, 0.5), n_snapshots=11), 2.0)
        assert traj.has_u
        for snapshot in traj:
            expected = 2.0 * 0.5 / (1.0 - snapshot.t)
            assert snapshot.u.value(np.array([[1.0, 0.0]]))[0] == pytest.approx(expected, rel=1e-7)

    def test_flat_constant(self):
        traj = conjugate_heat_solve(exact_family(AnalyticBackground('flat_torus'), (0.0, 0.5), 3, T=1.0), 3.0)
        assert traj[0].u.value(np.array([[0.5, 0.5]]))[0] == pytest.approx(3.0)

    def test_grid_constant(self):
        traj = conjugate_heat_solve(_static_flat(), 2.0)
        assert isinstance(traj[0].u, GridScalarField)
        assert np.allclose(traj[0].u.values, 2.0)

    def test_grid_heat_mode(self):
        traj = conjugate_heat_solve(_static_flat())
        x, _ = traj[0].metric.coordinates
        assert np.allclose(traj[-1].u.values, terminal_bump(traj[-1].metric))
        assert np.allclose(traj[0].u.values, 1 + 0.5 * np.exp(-0.1) * np.cos(x), atol=1e-3)

    def test_grid_callable(self):
        traj = conjugate_heat_solve(_static_flat(), lambda x, y: 1.5 + 0 * x)
        assert np.allclose(traj[0].u.values, 1.5)

    def test_invalid_terminal(self):
        with pytest.raises(NonpositiveU):
            conjugate_heat_solve(_static_flat(), -1.0)
        with pytest.raises(ValidationError):
            conjugate_heat_solve(sphere_family(np.sqrt(2.0), 'ricci', (0.0, 0.5), n_snapshots=3),
                                 lambda x, y: 1 + 0.1 * np.cos(x))
        with pytest.raises(ValidationError):
            terminal_bump(ConformalTorus(np.zeros((16, 16))), 1.5)

    def test_heat_stability(self):
        with pytest.raises(StabilityViolation):
            conjugate_heat_solve(_static_flat(), 1.0, dt=0.05)

    def test_single_snapshot(self):
        traj = _static_flat().select([0])
        with pytest.raises(InsufficientSnapshots):
            conjugate_heat_solve(traj, 1.0)

    def test_attach_exact_u(self):
        traj = attach_exact_u(exact_family(AnalyticBackground('flat_torus'), (0.0, 0.5), 3, T=1.0),
                              families.flat_heat_mode, (0.5, 1.0))
        assert traj.has_u
        assert traj[0].u.value(np.array([[0.0, 0.0]]))[0] == pytest.approx(1 + 0.5 * np.exp(-1.0))
        assert traj[-1].u.t == 0.5
