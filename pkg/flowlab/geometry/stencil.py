"""
Overview:
    Periodic finite-difference stencils built on :func:`numpy.roll`.

    Second-order stencils drive the time stepping, fourth-order ones are used where derived
    quantities need more accuracy.
"""
import numpy as np


def diff1(f: np.ndarray, h: float, axis: int, order: int = 4) -> np.ndarray:
    """
    Centered first derivative along ``axis`` of a periodic array, ``order`` is ``2`` or ``4``.
    """
    if order == 2:
        return (np.roll(f, -1, axis=axis) - np.roll(f, 1, axis=axis)) / (2 * h)
    elif order == 4:
        return (-np.roll(f, -2, axis=axis) + 8 * np.roll(f, -1, axis=axis)
                - 8 * np.roll(f, 1, axis=axis) + np.roll(f, 2, axis=axis)) / (12 * h)
    else:
        raise ValueError(f'Unsupported stencil order - {order!r}.')


def diff2(f: np.ndarray, h: float, axis: int, order: int = 4) -> np.ndarray:
    """
    Centered second derivative along ``axis`` of a periodic array.
    """
    if order == 2:
        return (np.roll(f, -1, axis=axis) - 2 * f + np.roll(f, 1, axis=axis)) / h ** 2
    elif order == 4:
        return (-np.roll(f, -2, axis=axis) + 16 * np.roll(f, -1, axis=axis) - 30 * f
                + 16 * np.roll(f, 1, axis=axis) - np.roll(f, 2, axis=axis)) / (12 * h ** 2)
    else:
        raise ValueError(f'Unsupported stencil order - {order!r}.')


def flat_laplacian(f: np.ndarray, h_x: float, h_y: float, order: int = 2) -> np.ndarray:
    """
    Flat Laplacian ``f_xx + f_yy`` over the two leading axes.
    """
    return diff2(f, h_x, 0, order) + diff2(f, h_y, 1, order)


def gradient(f: np.ndarray, h_x: float, h_y: float, order: int = 4) -> np.ndarray:
    """
    Partial derivatives over the two leading axes, stacked right after them,
    so an array of shape ``(nx, ny, *rest)`` becomes ``(nx, ny, 2, *rest)``.
    """
    return np.stack([diff1(f, h_x, 0, order), diff1(f, h_y, 1, order)], axis=2)
