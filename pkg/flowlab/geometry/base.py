"""
Overview:
    Common interface of the 2D ambient metrics a curve can live in.
"""
from abc import ABC, abstractmethod
from typing import Optional, Tuple

import numpy as np


def riemann_from_scalar(g: np.ndarray, scalar: np.ndarray) -> np.ndarray:
    """
    Full covariant curvature tensor of a surface, ``R_abcd = (R/2) (g_ac g_bd - g_ad g_bc)``.
    """
    return 0.5 * scalar[..., None, None, None, None] * (
            np.einsum('...ac,...bd->...abcd', g, g) - np.einsum('...ad,...bc->...abcd', g, g)
    )


class MetricField(ABC):
    """
    A Riemannian metric on a 2D chart, frozen at time :attr:`t`.

    Points are given in chart coordinates with shape ``(N, 2)``, every tensor is returned with the
    point index first. Christoffel symbols are laid out as ``gamma[..., k, i, j]``.
    """

    @property
    @abstractmethod
    def t(self) -> float:
        raise NotImplementedError  # pragma: no cover

    @property
    @abstractmethod
    def is_compact(self) -> bool:
        raise NotImplementedError  # pragma: no cover

    @property
    def periods(self) -> Optional[Tuple[float, float]]:
        """
        Periods of the chart along both axes, ``None`` for non-periodic axes.
        """
        return None

    @abstractmethod
    def metric_tensor(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def christoffel(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def scalar_curvature(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError  # pragma: no cover

    def inverse_metric(self, points: np.ndarray) -> np.ndarray:
        return np.linalg.inv(self.metric_tensor(points))

    def ricci(self, points: np.ndarray) -> np.ndarray:
        return 0.5 * self.scalar_curvature(points)[..., None, None] * self.metric_tensor(points)

    def riemann(self, points: np.ndarray) -> np.ndarray:
        return riemann_from_scalar(self.metric_tensor(points), self.scalar_curvature(points))
