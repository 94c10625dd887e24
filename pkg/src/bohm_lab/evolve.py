from dataclasses import dataclass

import enum
import logging
import math
import numpy as np
import scipy.fft
from typing import List, Tuple

from .fields import FieldMismatchError, WaveField, norm
from .grid import Grid
from .potentials import Potential
from .types import ComplexArray, RealArray


log = logging.getLogger(__name__)


NORM_DRIFT_WARNING = 1e-9


class Method(str, enum.Enum):
    STRANG = "strang"


@dataclass(frozen=True)
class EvolutionPlan:
    dt: float
    steps: int
    snapshot_stride: int = 1
    method: Method = Method.STRANG
    backward: bool = False

    def __post_init__(self) -> None:
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.snapshot_stride < 1:
            raise ValueError(
                f"snapshot_stride must be >= 1, got {self.snapshot_stride}"
            )

    @property
    def signed_dt(self) -> float:
        return -self.dt if self.backward else self.dt

    @property
    def duration(self) -> float:
        return self.dt * self.steps

    def snapshot_steps(self) -> List[int]:
        ret = list(range(0, self.steps + 1, self.snapshot_stride))
        if ret[-1] != self.steps:
            ret.append(self.steps)
        return ret


def advisory_dt(grid: Grid, hbar: float, mass: float) -> float:
    return min(grid.spacing) ** 2 * mass / (hbar * math.pi)


def check_advisory(plan: EvolutionPlan, grid: Grid, hbar: float, mass: float) -> bool:
    limit = advisory_dt(grid, hbar, mass)
    if plan.dt > limit:
        log.warning(
            "dt=%.6g exceeds the advisory limit %.6g; "
            "high wavenumbers will be poorly resolved in time",
            plan.dt,
            limit,
        )
        return False
    return True


def kinetic_symbol(grid: Grid, hbar: float, mass: float) -> RealArray:
    """hbar^2 |k|^2 / 2m on the FFT wavenumber lattice."""
    ks = np.meshgrid(
        *(grid.wavenumbers(axis) for axis in range(grid.dims)), indexing="ij"
    )
    return hbar**2 * sum(k**2 for k in ks) / (2 * mass)  # type: ignore[no-any-return]


class SplitStepPropagator:
    """Strang splitting: half potential kick, exact kinetic drift, half kick."""

    def __init__(
        self,
        grid: Grid,
        potential: Potential,
        dt: float,
        hbar: float = 1.0,
        mass: float = 1.0,
    ) -> None:
        if potential.grid != grid:
            raise FieldMismatchError("potential is sampled on a different grid")
        self._grid = grid
        self._dt = dt
        self._half_kick = np.exp(-0.5j * potential.values * dt / hbar)
        self._drift = np.exp(-1j * kinetic_symbol(grid, hbar, mass) * dt / hbar)

    @property
    def dt(self) -> float:
        return self._dt

    def apply(self, amplitude: ComplexArray) -> ComplexArray:
        tmp = scipy.fft.fftn(self._half_kick * amplitude)
        tmp = scipy.fft.ifftn(self._drift * tmp, overwrite_x=True)
        return self._half_kick * tmp  # type: ignore[no-any-return]

    def step(self, field: WaveField) -> WaveField:
        if field.grid != self._grid:
            raise FieldMismatchError("field and propagator grids differ")
        return field.evolved(self.apply(field.amplitude), field.time + self._dt)


def step(field: WaveField, potential: Potential, dt: float) -> WaveField:
    """Advance one Strang step; negative dt runs time backwards."""
    return SplitStepPropagator(
        field.grid, potential, dt, field.hbar, field.mass
    ).step(field)


@dataclass(frozen=True)
class Evolution:
    snapshots: Tuple[WaveField, ...]
    plan: EvolutionPlan
    norm_drift: float
    advisory_ok: bool

    def __len__(self) -> int:
        return len(self.snapshots)

    def __getitem__(self, index: int) -> WaveField:
        return self.snapshots[index]

    @property
    def times(self) -> List[float]:
        return [s.time for s in self.snapshots]


def evolve(field: WaveField, potential: Potential, plan: EvolutionPlan) -> Evolution:
    advisory_ok = check_advisory(plan, field.grid, field.hbar, field.mass)
    propagator = SplitStepPropagator(
        field.grid, potential, plan.signed_dt, field.hbar, field.mass
    )
    keep = set(plan.snapshot_steps())
    norm0 = norm(field)
    snapshots = [field]
    drift = 0.0
    amplitude = np.array(field.amplitude)
    for n in range(1, plan.steps + 1):
        amplitude = propagator.apply(amplitude)
        if n in keep:
            # stamps are exact multiples of dt
            snap = field.evolved(amplitude, field.time + n * plan.signed_dt)
            drift = max(drift, abs(norm(snap) - norm0))
            snapshots.append(snap)
    log.info(
        "Evolved %d steps of dt=%.6g, %d snapshots, norm drift %.3g",
        plan.steps,
        plan.dt,
        len(snapshots),
        drift,
    )
    if drift > NORM_DRIFT_WARNING:
        log.warning("norm drift %.3g exceeds %.1g", drift, NORM_DRIFT_WARNING)
    return Evolution(tuple(snapshots), plan, drift, advisory_ok)


def energy_expectation(field: WaveField, potential: Potential) -> float:
    """<Psi|H|Psi> / <Psi|Psi> with the kinetic part taken in spectral space."""
    if potential.grid != field.grid:
        raise FieldMismatchError("potential is sampled on a different grid")
    psi = field.amplitude
    t_psi = scipy.fft.ifftn(
        kinetic_symbol(field.grid, field.hbar, field.mass) * scipy.fft.fftn(psi)
    )
    integrand = np.conj(psi) * t_psi + potential.values * np.abs(psi) ** 2
    total = field.grid.integrate(integrand).real
    return float(total / norm(field) ** 2)
