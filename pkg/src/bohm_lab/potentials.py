# Potential library
#
# A spec describes a potential independently of the grid, a Potential is the
# spec sampled on a grid together with its (non-periodic) derivatives.

from dataclasses import dataclass

import enum
import logging
import numpy as np
from functools import cached_property
from scipy.interpolate import RegularGridInterpolator
from typing import Optional, Sequence, Tuple, Union

from .derivatives import sampled_gradient, sampled_laplacian
from .grid import Grid
from .types import RealArray


log = logging.getLogger(__name__)


RAMP_CELLS = 2.0


class PotentialError(ValueError):
    pass


class PotentialKind(str, enum.Enum):
    FREE = "free"
    CONSTANT = "constant"
    HARMONIC = "harmonic"
    TWO_SLIT = "two_slit"
    CUSTOM = "custom"


Coords = Sequence[np.ndarray]


@dataclass(frozen=True)
class FreePotential:
    kind = PotentialKind.FREE

    def evaluate(self, coords: Coords, mass: float = 1.0) -> np.ndarray:
        return np.zeros(np.broadcast(*coords).shape)

    def validate(self, grid: Grid) -> None:
        pass


@dataclass(frozen=True)
class ConstantPotential:
    value: float
    kind = PotentialKind.CONSTANT

    def evaluate(self, coords: Coords, mass: float = 1.0) -> np.ndarray:
        return np.full(np.broadcast(*coords).shape, float(self.value))

    def validate(self, grid: Grid) -> None:
        if not np.isfinite(self.value):
            raise PotentialError("constant potential must be finite")


@dataclass(frozen=True)
class HarmonicPotential:
    omega: float
    center: Optional[Tuple[float, ...]] = None
    kind = PotentialKind.HARMONIC

    def evaluate(self, coords: Coords, mass: float = 1.0) -> np.ndarray:
        center = self.center or (0.0,) * len(coords)
        r2 = sum((x - c) ** 2 for x, c in zip(coords, center))
        return 0.5 * mass * self.omega**2 * np.asarray(r2, dtype=float)

    def validate(self, grid: Grid) -> None:
        if self.omega <= 0:
            raise PotentialError(f"omega must be positive, got {self.omega}")
        if self.center is not None and len(self.center) != grid.dims:
            raise PotentialError("harmonic center does not match grid dimensions")


def _smoothstep(t: np.ndarray) -> np.ndarray:
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3 - 2 * t)


def _smooth_box(u: np.ndarray, lo: float, hi: float, ramp: float) -> np.ndarray:
    if ramp <= 0:
        return ((u >= lo) & (u <= hi)).astype(float)
    return _smoothstep((u - lo) / ramp + 0.5) * _smoothstep((hi - u) / ramp + 0.5)


@dataclass(frozen=True)
class TwoSlitBarrier:
    """Wall of finite height across axis 0 pierced by two slits along axis 1."""

    x_wall: float
    thickness: float
    height: float
    slit_centers: Tuple[float, float]
    slit_width: float
    kind = PotentialKind.TWO_SLIT

    def evaluate(
        self, coords: Coords, mass: float = 1.0, ramp: float = 0.0
    ) -> np.ndarray:
        x, y = coords
        half = self.thickness / 2
        wall = _smooth_box(x, self.x_wall - half, self.x_wall + half, ramp)
        gaps = sum(
            _smooth_box(y, c - self.slit_width / 2, c + self.slit_width / 2, ramp)
            for c in self.slit_centers
        )
        return self.height * wall * (1 - gaps)

    def validate(self, grid: Grid) -> None:
        if grid.dims != 2:
            raise PotentialError("a two-slit barrier needs a 2D grid")
        if self.height < 0:
            raise PotentialError(f"barrier height must be >= 0, got {self.height}")
        if self.thickness <= 0:
            raise PotentialError(
                f"wall thickness must be positive, got {self.thickness}"
            )
        if self.slit_width <= 0:
            raise PotentialError(f"slit width must be positive, got {self.slit_width}")
        if len(self.slit_centers) != 2:
            raise PotentialError("exactly two slit centers are required")
        half = self.thickness / 2
        if self.x_wall - half < grid.mins[0] or self.x_wall + half > grid.maxs[0]:
            raise PotentialError("wall lies outside the grid")
        c1, c2 = sorted(self.slit_centers)
        if c2 - c1 < self.slit_width:
            raise PotentialError(
                f"slits at {c1} and {c2} of width {self.slit_width} overlap"
            )
        w = self.slit_width / 2
        if c1 - w < grid.mins[1] or c2 + w > grid.maxs[1]:
            raise PotentialError("slits lie outside the wall")

    @property
    def separation(self) -> float:
        return abs(self.slit_centers[1] - self.slit_centers[0])


@dataclass(frozen=True, eq=False)
class SampledPotential:
    """Arbitrary real potential given by samples on a grid."""

    grid: Grid
    values: RealArray
    kind = PotentialKind.CUSTOM

    def evaluate(self, coords: Coords, mass: float = 1.0) -> np.ndarray:
        interp = RegularGridInterpolator(
            self.grid.axes, np.asarray(self.values, dtype=float), bounds_error=False
        )
        shape = np.broadcast(*coords).shape
        points = np.stack([np.broadcast_to(c, shape).ravel() for c in coords], axis=-1)
        return interp(points).reshape(shape)

    def validate(self, grid: Grid) -> None:
        if grid != self.grid:
            raise PotentialError("custom potential was sampled on a different grid")
        values = np.asarray(self.values)
        if values.shape != grid.shape:
            raise PotentialError(
                f"custom samples of shape {values.shape} do not match {grid.shape}"
            )
        if not np.all(np.isfinite(values)) or np.iscomplexobj(values):
            raise PotentialError("custom potential must be finite and real")


PotentialSpec = Union[
    FreePotential,
    ConstantPotential,
    HarmonicPotential,
    TwoSlitBarrier,
    SampledPotential,
]


@dataclass(frozen=True, eq=False)
class Potential:
    grid: Grid
    spec: PotentialSpec
    values: RealArray
    mass: float = 1.0

    @property
    def kind(self) -> PotentialKind:
        return self.spec.kind

    @cached_property
    def gradient(self) -> RealArray:
        return sampled_gradient(self.values, self.grid)

    @cached_property
    def laplacian(self) -> RealArray:
        return sampled_laplacian(self.values, self.grid)

    def is_constant(self) -> bool:
        return bool(np.ptp(self.values) == 0.0)


def build_potential(grid: Grid, spec: PotentialSpec, mass: float = 1.0) -> Potential:
    spec.validate(grid)
    coords = grid.mesh()
    if isinstance(spec, TwoSlitBarrier):
        ramp = RAMP_CELLS * min(grid.spacing)
        values = spec.evaluate(coords, mass, ramp=ramp)
    elif isinstance(spec, SampledPotential):
        values = np.array(spec.values, dtype=float)
    else:
        values = spec.evaluate(coords, mass)
    values = np.asarray(values, dtype=float)
    values.setflags(write=False)
    log.debug(
        "Potential %s sampled, range [%.6g, %.6g]",
        spec.kind.value,
        values.min(),
        values.max(),
    )
    return Potential(grid, spec, values, mass)
