# Bohmian trajectories
#
# Particles follow v = grad J / m, interpolated linearly in space and time
# between stored snapshots and integrated with classic RK4 substeps.  A
# particle whose velocity becomes undefined is frozen in place, a particle
# leaving the grid box is marked as exited.

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import logging
import math
import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import RegularGridInterpolator
from typing import List, Optional, Sequence, Tuple

from .bohm import DEFAULT_RHO_FLOOR, decompose
from .derivatives import Backend
from .fields import WaveField, check_same_grid
from .grid import Grid
from .types import DerivativeBackend, ParticleFlag, RealArray


log = logging.getLogger(__name__)


MAX_SUBSTEPS = 64
COURANT = 0.25
REJECTION_BATCH = 65536

FLAG_ORDER = (ParticleFlag.ACTIVE, ParticleFlag.FROZEN, ParticleFlag.EXITED)
_ACTIVE, _FROZEN, _EXITED = range(3)


class DegenerateDensityError(ValueError):
    pass


class UndefinedVelocityError(ValueError):
    pass


# #### Sampling ####


def sample_initial(
    field: WaveField, count: int, seed: Optional[int] = None
) -> RealArray:
    """Draw ``count`` positions from |Psi|^2, shaped ``(count, dims)``.

    1D uses the inverse of the trapezoid CDF, 2D rejection sampling against
    the bilinear density with the density maximum as envelope.
    """
    if count < 1:
        raise ValueError(f"particle count must be >= 1, got {count}")
    grid = field.grid
    rho = np.abs(field.amplitude) ** 2
    peak = float(rho.max())
    if not (peak > 0 and math.isfinite(peak)):
        raise DegenerateDensityError("density vanishes everywhere")
    rng = np.random.default_rng(seed)

    if grid.dims == 1:
        x = grid.axes[0]
        cdf = cumulative_trapezoid(rho, x, initial=0.0)
        if not cdf[-1] > 0:
            raise DegenerateDensityError("density integrates to zero")
        cdf /= cdf[-1]
        picks: RealArray = np.interp(rng.random(count), cdf, x)
        return picks.reshape(-1, 1)

    density = RegularGridInterpolator(grid.axes, rho)
    lo = np.asarray(grid.mins)
    hi = np.asarray(grid.maxs)
    accepted: List[np.ndarray] = []
    total = 0
    while total < count:
        trial = lo + (hi - lo) * rng.random((REJECTION_BATCH, grid.dims))
        keep = trial[rng.random(REJECTION_BATCH) * peak < density(trial)]
        accepted.append(keep)
        total += len(keep)
    return np.concatenate(accepted)[:count]


# #### Velocity field ####


class VelocityField:
    """Bohmian velocity of a snapshot series, linear in space and time."""

    def __init__(
        self,
        snapshots: Sequence[WaveField],
        backend: Backend = DerivativeBackend.SPECTRAL,
        rel_floor: float = DEFAULT_RHO_FLOOR,
    ) -> None:
        if len(snapshots) < 2:
            raise ValueError("at least two snapshots are required")
        check_same_grid(*snapshots)
        times = np.array([s.time for s in snapshots])
        if np.any(np.diff(times) <= 0):
            raise ValueError("snapshot times must be strictly increasing")
        self._grid = snapshots[0].grid
        self._times = times
        self._speed = 0.0
        self._velocity: List[RegularGridInterpolator] = []
        self._mask: List[RegularGridInterpolator] = []
        for snap in snapshots:
            bohm = decompose(
                snap, backend=backend, rel_floor=rel_floor, with_action=False
            )
            self._speed = max(self._speed, float(np.max(np.abs(bohm.v))))
            self._velocity.append(
                RegularGridInterpolator(
                    self._grid.axes,
                    np.moveaxis(bohm.v, 0, -1),
                    bounds_error=False,
                    fill_value=0.0,
                )
            )
            self._mask.append(
                RegularGridInterpolator(
                    self._grid.axes,
                    bohm.mask.astype(float),
                    method="nearest",
                    bounds_error=False,
                    fill_value=0.0,
                )
            )

    @property
    def grid(self) -> Grid:
        return self._grid

    @property
    def times(self) -> RealArray:
        return self._times

    @property
    def max_speed(self) -> float:
        return self._speed

    def interval(self, time: float) -> int:
        if not self._times[0] <= time <= self._times[-1]:
            raise ValueError(
                f"time {time} outside the snapshot span "
                f"[{self._times[0]}, {self._times[-1]}]"
            )
        i = int(np.searchsorted(self._times, time, side="right")) - 1
        return min(i, len(self._times) - 2)

    def evaluate(
        self, positions: RealArray, time: float, interval: Optional[int] = None
    ) -> Tuple[RealArray, np.ndarray]:
        """Velocities at ``positions`` and a status code per particle.

        Status is 0 for a defined velocity, 1 inside a node region and 2
        outside the grid; undefined velocities are returned as zero.
        """
        i = self.interval(time) if interval is None else interval
        t0, t1 = self._times[i], self._times[i + 1]
        w = (time - t0) / (t1 - t0)
        before = self._velocity[i](positions)
        after = self._velocity[i + 1](positions)
        vel = (1 - w) * before + w * after
        defined = (self._mask[i](positions) > 0.5) & (
            self._mask[i + 1](positions) > 0.5
        )
        inside = self._grid.contains(positions)
        status = np.where(inside, np.where(defined, _ACTIVE, _FROZEN), _EXITED)
        vel[status != _ACTIVE] = 0.0
        return vel, status

    def substeps(self, interval: int) -> int:
        span = self._times[interval + 1] - self._times[interval]
        if self._speed == 0:
            return 1
        limit = COURANT * min(self._grid.spacing) / self._speed
        return max(1, min(MAX_SUBSTEPS, math.ceil(span / limit)))


def velocity_at(
    snapshots: Sequence[WaveField],
    position: Sequence[float],
    time: float,
    backend: Backend = DerivativeBackend.SPECTRAL,
) -> RealArray:
    field = VelocityField(snapshots, backend)
    vel, status = field.evaluate(
        np.asarray(position, dtype=float).reshape(1, -1), time
    )
    if status[0] != _ACTIVE:
        where = "outside the grid" if status[0] == _EXITED else "in a node region"
        raise UndefinedVelocityError(
            f"velocity at {tuple(position)} is undefined {where}"
        )
    return vel[0]  # type: ignore[no-any-return]


# #### Integration ####


@dataclass(frozen=True, eq=False)
class TrajectoryEnsemble:
    times: RealArray
    positions: RealArray  # (times, particles, dims)
    codes: np.ndarray
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if self.positions.shape[1] < 1:
            raise ValueError("an ensemble needs at least one particle")

    @property
    def count(self) -> int:
        return int(self.positions.shape[1])

    @property
    def dims(self) -> int:
        return int(self.positions.shape[2])

    @property
    def flags(self) -> List[ParticleFlag]:
        return [FLAG_ORDER[c] for c in self.codes]

    @property
    def weights(self) -> RealArray:
        return np.full(self.count, 1.0 / self.count)

    @property
    def final(self) -> RealArray:
        return self.positions[-1]  # type: ignore[no-any-return]

    def active(self) -> np.ndarray:
        return self.codes == _ACTIVE  # type: ignore[no-any-return]


def _integrate_chunk(
    field: VelocityField, start: RealArray
) -> Tuple[RealArray, np.ndarray]:
    pos = np.array(start, dtype=float)
    codes = np.where(field.grid.contains(pos), _ACTIVE, _EXITED)
    history = [pos.copy()]
    times = field.times
    for i in range(len(times) - 1):
        n_sub = field.substeps(i)
        h = (times[i + 1] - times[i]) / n_sub
        for k in range(n_sub):
            idx = np.flatnonzero(codes == _ACTIVE)
            if not idx.size:
                break
            t = times[i] + k * h
            p = pos[idx]
            k1, s1 = field.evaluate(p, t, i)
            k2, s2 = field.evaluate(p + 0.5 * h * k1, t + 0.5 * h, i)
            k3, s3 = field.evaluate(p + 0.5 * h * k2, t + 0.5 * h, i)
            k4, s4 = field.evaluate(p + h * k3, t + h, i)
            new = p + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            status = np.maximum.reduce([s1, s2, s3, s4])
            status = np.where(field.grid.contains(new), status, _EXITED)
            good = status == _ACTIVE
            pos[idx[good]] = new[good]
            codes[idx[~good]] = status[~good]
        history.append(pos.copy())
    return np.stack(history), codes


def integrate(
    snapshots: Sequence[WaveField],
    initial_positions: RealArray,
    *,
    seed: Optional[int] = None,
    threads: int = 1,
    backend: Backend = DerivativeBackend.SPECTRAL,
) -> TrajectoryEnsemble:
    """RK4 integration through the snapshot series.

    Positions are stored at every snapshot time.  With ``threads > 1``
    the particles are split in contiguous chunks integrated concurrently;
    the result does not depend on the split.
    """
    field = VelocityField(snapshots, backend)
    start = np.asarray(initial_positions, dtype=float).reshape(-1, field.grid.dims)
    if not len(start):
        raise ValueError("no initial positions")
    chunks = np.array_split(start, max(1, min(threads, len(start))))
    if len(chunks) == 1:
        results = [_integrate_chunk(field, chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            results = list(pool.map(lambda c: _integrate_chunk(field, c), chunks))
    positions = np.concatenate([r[0] for r in results], axis=1)
    codes = np.concatenate([r[1] for r in results])
    frozen = int(np.count_nonzero(codes == _FROZEN))
    exited = int(np.count_nonzero(codes == _EXITED))
    if frozen or exited:
        log.warning(
            "%d of %d particles frozen in node regions, %d left the grid",
            frozen,
            len(codes),
            exited,
        )
    log.info(
        "Integrated %d trajectories over %d snapshots", len(codes), len(field.times)
    )
    return TrajectoryEnsemble(field.times.copy(), positions, codes, seed)


# #### Ensemble checks ####


@dataclass(frozen=True)
class CrossingReport:
    # (time index, particle, next particle)
    violations: Tuple[Tuple[int, int, int], ...]
    checked_times: int

    @property
    def ok(self) -> bool:
        return not self.violations


def crossing_check(ensemble: TrajectoryEnsemble) -> CrossingReport:
    """Particles on a line must keep their initial order at every stored time."""
    if ensemble.dims != 1:
        raise ValueError("the crossing check applies to 1D ensembles")
    x = ensemble.positions[..., 0]
    order = np.argsort(x[0], kind="stable")
    ordered = x[:, order]
    bad = np.argwhere(np.diff(ordered, axis=1) < 0)
    violations = tuple(
        (int(t), int(order[j]), int(order[j + 1])) for t, j in bad
    )
    if violations:
        log.warning("%d trajectory crossings detected", len(violations))
    return CrossingReport(violations, len(ensemble.times))


def equivariance_distance(
    ensemble: TrajectoryEnsemble,
    field: WaveField,
    bins: int = 50,
    time_index: int = -1,
) -> float:
    """Total-variation distance between the particle histogram and |Psi|^2."""
    grid = field.grid
    if grid.dims != ensemble.dims:
        raise ValueError("ensemble and field dimensions differ")
    rho = np.abs(field.amplitude) ** 2
    points = ensemble.positions[time_index][ensemble.active()]
    if not len(points):
        raise DegenerateDensityError("no active particles left")
    ranges = list(zip(grid.mins, grid.maxs))
    sample, edges = np.histogramdd(points, bins=bins, range=ranges)
    sample = sample / sample.sum()
    if grid.dims == 1:
        x = grid.axes[0]
        cdf = cumulative_trapezoid(rho, x, initial=0.0)
        expected = np.diff(np.interp(edges[0], x, cdf / cdf[-1]))
    else:
        mesh = np.stack([m.ravel() for m in grid.mesh()], axis=-1)
        expected, _ = np.histogramdd(mesh, bins=edges, weights=rho.ravel())
        expected = expected / expected.sum()
    return 0.5 * float(np.abs(sample - expected).sum())
