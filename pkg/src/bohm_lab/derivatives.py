# Differential operators on uniform grids.
#
# Wavefunctions are differentiated either spectrally (periodic, default) or
# by second-order central differences with periodic wrap-around.  Potentials
# are not periodic, so they get one-sided closures at the grid edges instead.

import numpy as np
import scipy.fft
from typing import Union

from .grid import Grid
from .types import DerivativeBackend


Backend = Union[DerivativeBackend, str]


def _spectral(values: np.ndarray, grid: Grid, axis: int, order: int) -> np.ndarray:
    n = grid.points[axis]
    k = grid.wavenumbers(axis)
    if order % 2 == 1 and n % 2 == 0:
        # The Nyquist mode has no odd derivative on a real grid
        k = k.copy()
        k[n // 2] = 0.0
    shape = [1] * values.ndim
    shape[axis] = n
    factor = ((1j * k) ** order).reshape(shape)
    ret = scipy.fft.ifft(factor * scipy.fft.fft(values, axis=axis), axis=axis)
    if np.isrealobj(values):
        return np.ascontiguousarray(ret.real)
    return ret


def _central(values: np.ndarray, grid: Grid, axis: int, order: int) -> np.ndarray:
    h = grid.spacing[axis]
    forward = np.roll(values, -1, axis=axis)
    backward = np.roll(values, 1, axis=axis)
    if order == 1:
        return (forward - backward) / (2 * h)
    if order == 2:
        return (forward - 2 * values + backward) / h**2
    raise ValueError(f"central differences support orders 1 and 2, not {order}")


def partial(
    values: np.ndarray,
    grid: Grid,
    axis: int,
    order: int = 1,
    backend: Backend = DerivativeBackend.SPECTRAL,
) -> np.ndarray:
    """Derivative of a periodic grid function along one axis."""
    if values.shape != grid.shape:
        raise ValueError(f"values of shape {values.shape} do not match {grid.shape}")
    backend = DerivativeBackend(backend)
    if backend == DerivativeBackend.SPECTRAL:
        return _spectral(values, grid, axis, order)
    return _central(values, grid, axis, order)


def gradient(
    values: np.ndarray,
    grid: Grid,
    backend: Backend = DerivativeBackend.SPECTRAL,
) -> np.ndarray:
    """Gradient stacked along a new leading axis of length ``grid.dims``."""
    return np.stack(
        [partial(values, grid, axis, 1, backend) for axis in range(grid.dims)]
    )


def laplacian(
    values: np.ndarray,
    grid: Grid,
    backend: Backend = DerivativeBackend.SPECTRAL,
) -> np.ndarray:
    return sum(  # type: ignore[return-value]
        partial(values, grid, axis, 2, backend) for axis in range(grid.dims)
    )


def divergence(
    vector: np.ndarray,
    grid: Grid,
    backend: Backend = DerivativeBackend.SPECTRAL,
) -> np.ndarray:
    if vector.shape != (grid.dims, *grid.shape):
        raise ValueError(
            f"vector field of shape {vector.shape} does not match "
            f"{(grid.dims, *grid.shape)}"
        )
    return sum(  # type: ignore[return-value]
        partial(vector[axis], grid, axis, 1, backend) for axis in range(grid.dims)
    )


def sampled_gradient(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Second-order gradient of a non-periodic sampled field."""
    if grid.dims == 1:
        return np.stack([np.gradient(values, grid.spacing[0], edge_order=2)])
    return np.stack(np.gradient(values, *grid.spacing, edge_order=2))


def sampled_laplacian(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Second-order Laplacian of a non-periodic sampled field.

    Interior points use the three-point stencil, edge points the one-sided
    four-point closure ``(2f0 - 5f1 + 4f2 - f3) / h**2``.
    """
    ret = np.zeros_like(values, dtype=float)
    for axis, h in enumerate(grid.spacing):
        f = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
        d2 = np.empty_like(f)
        d2[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / h**2
        d2[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / h**2
        d2[-1] = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / h**2
        ret += np.moveaxis(d2, 0, axis)
    return ret
