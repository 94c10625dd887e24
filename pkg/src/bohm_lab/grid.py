from dataclasses import dataclass

import logging
import math
import numpy as np
from functools import cached_property
from typing import Sequence, Tuple, Union

from .types import Point, RealArray


log = logging.getLogger(__name__)


MIN_POINTS = 8
MAX_POINTS = 2**22


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    """Uniform rectangular lattice in one or two dimensions.

    Both extents are sample positions, so ``spacing = (max - min) / (points - 1)``.
    Spectral operations treat the grid as periodic with period
    ``points * spacing`` along every axis.
    """

    mins: Tuple[float, ...]
    maxs: Tuple[float, ...]
    points: Tuple[int, ...]

    def __post_init__(self) -> None:
        if not (len(self.mins) == len(self.maxs) == len(self.points)):
            raise GridError("extents and points disagree on the number of axes")
        if self.dims not in (1, 2):
            raise GridError(f"only 1D and 2D grids are supported, got {self.dims}D")
        for axis, (lo, hi, n) in enumerate(zip(self.mins, self.maxs, self.points)):
            if n < MIN_POINTS:
                raise GridError(
                    f"too few points on axis {axis}: {n} < {MIN_POINTS}"
                )
            if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
                raise GridError(
                    f"non-positive extent span on axis {axis}: [{lo}, {hi}]"
                )

    @property
    def dims(self) -> int:
        return len(self.points)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.points

    @property
    def size(self) -> int:
        return math.prod(self.points)

    @property
    def spacing(self) -> Tuple[float, ...]:
        return tuple(
            (hi - lo) / (n - 1) for lo, hi, n in zip(self.mins, self.maxs, self.points)
        )

    @property
    def periods(self) -> Tuple[float, ...]:
        return tuple(n * h for n, h in zip(self.points, self.spacing))

    @property
    def volume(self) -> float:
        return math.prod(self.periods)

    @property
    def cell_volume(self) -> float:
        return math.prod(self.spacing)

    @cached_property
    def axes(self) -> Tuple[RealArray, ...]:
        return tuple(
            np.linspace(lo, hi, n)
            for lo, hi, n in zip(self.mins, self.maxs, self.points)
        )

    def mesh(self) -> Tuple[RealArray, ...]:
        return tuple(np.meshgrid(*self.axes, indexing="ij"))

    def wavenumbers(self, axis: int) -> RealArray:
        n = self.points[axis]
        return 2 * np.pi * np.fft.fftfreq(n, d=self.spacing[axis])

    def integrate(self, values: np.ndarray) -> np.ndarray:
        # Periodic trapezoid rule: every sample carries one full cell
        axes = tuple(range(-self.dims, 0))
        return np.sum(values, axis=axes) * self.cell_volume

    def contains(self, positions: np.ndarray) -> np.ndarray:
        pos = np.asarray(positions, dtype=float).reshape(-1, self.dims)
        lo = np.asarray(self.mins)
        hi = np.asarray(self.maxs)
        return np.all((pos >= lo) & (pos <= hi), axis=1)

    def nearest_index(self, point: Sequence[float]) -> Tuple[int, ...]:
        if len(point) != self.dims:
            raise GridError(
                f"point {tuple(point)} does not have {self.dims} coordinates"
            )
        ret = []
        for value, lo, h, n in zip(point, self.mins, self.spacing, self.points):
            idx = int(round((value - lo) / h))
            if not 0 <= idx < n:
                raise GridError(f"point {tuple(point)} is outside the grid")
            ret.append(idx)
        return tuple(ret)

    def coordinates(self, index: Sequence[int]) -> Point:
        return tuple(float(ax[i]) for ax, i in zip(self.axes, index))


def make_grid(
    dims: int,
    extents: Sequence[Tuple[float, float]],
    points: Union[int, Sequence[int]],
    *,
    endpoint: bool = True,
    max_points: int = MAX_POINTS,
) -> Grid:
    """Build a grid from per-axis ``(min, max)`` extents.

    With ``endpoint=False`` the upper extent is treated as the period end and
    is not sampled, like ``numpy.linspace(..., endpoint=False)``.
    """
    if len(extents) != dims:
        raise GridError(f"expected {dims} extents, got {len(extents)}")
    if isinstance(points, int):
        counts = (points,) * dims
    else:
        counts = tuple(int(p) for p in points)
        if len(counts) != dims:
            raise GridError(f"expected {dims} point counts, got {len(counts)}")
    mins = []
    maxs = []
    for (lo, hi), n in zip(extents, counts):
        if n < MIN_POINTS:
            raise GridError(f"too few points: {n} < {MIN_POINTS}")
        if hi <= lo:
            raise GridError(f"non-positive extent span: [{lo}, {hi}]")
        mins.append(float(lo))
        maxs.append(float(hi) if endpoint else lo + (hi - lo) * (n - 1) / n)
    if math.prod(counts) > max_points:
        raise GridError(
            f"grid of {math.prod(counts)} points exceeds the cap of {max_points}"
        )
    grid = Grid(tuple(mins), tuple(maxs), counts)
    log.debug("Grid %s with spacing %s", counts, grid.spacing)
    return grid
