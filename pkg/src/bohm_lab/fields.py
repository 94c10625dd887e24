from dataclasses import dataclass

import logging
import math
import numpy as np
from typing import Optional, Sequence, Union

from .grid import Grid
from .types import ComplexArray


log = logging.getLogger(__name__)


BOUNDARY_DECAY = 1e-12
PACKET_MARGIN = 4.0

Vector = Union[float, Sequence[float]]


class FieldMismatchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class WaveField:
    """Complex amplitude sampled on a grid at a time stamp.

    The amplitude array is copied on construction and made read-only.
    """

    grid: Grid
    amplitude: ComplexArray
    time: float = 0.0
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self) -> None:
        amp = np.array(self.amplitude, dtype=np.complex128)
        if amp.shape != self.grid.shape:
            raise FieldMismatchError(
                f"amplitude of shape {amp.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(amp)):
            raise ValueError("amplitude must be finite everywhere")
        if not (self.hbar > 0 and self.mass > 0):
            raise ValueError("hbar and mass must be positive")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitude", amp)

    def evolved(self, amplitude: np.ndarray, time: float) -> "WaveField":
        return WaveField(self.grid, amplitude, time, self.hbar, self.mass)

    def scaled(self, factor: complex) -> "WaveField":
        return self.evolved(self.amplitude * factor, self.time)


def _as_vector(value: Optional[Vector], dims: int, name: str) -> np.ndarray:
    if value is None:
        return np.zeros(dims)
    if isinstance(value, (int, float)):
        return np.full(dims, float(value))
    ret = np.asarray(value, dtype=float)
    if ret.shape != (dims,):
        raise ValueError(f"{name} must have {dims} components, got {tuple(ret.shape)}")
    return ret


def check_same_grid(*fields: WaveField) -> None:
    first = fields[0]
    for other in fields[1:]:
        if other.grid != first.grid:
            raise FieldMismatchError("fields live on different grids")
        if (other.hbar, other.mass) != (first.hbar, first.mass):
            raise FieldMismatchError("fields use different hbar or mass")


def boundary_density_ratio(field: WaveField) -> float:
    rho = np.abs(field.amplitude) ** 2
    peak = float(rho.max())
    if peak == 0.0:
        return 0.0
    edge = 0.0
    for axis in range(field.grid.dims):
        moved = np.moveaxis(rho, axis, 0)
        edge = max(edge, float(moved[0].max()), float(moved[-1].max()))
    return edge / peak


def warn_boundary_decay(field: WaveField, what: str) -> None:
    ratio = boundary_density_ratio(field)
    if ratio >= BOUNDARY_DECAY:
        log.warning(
            "%s does not decay at the grid boundary (edge/peak density %.3g); "
            "periodic images will interfere",
            what,
            ratio,
        )


def norm(field: WaveField) -> float:
    return math.sqrt(float(field.grid.integrate(np.abs(field.amplitude) ** 2)))


def inner_product(a: WaveField, b: WaveField) -> complex:
    check_same_grid(a, b)
    return complex(a.grid.integrate(np.conj(a.amplitude) * b.amplitude))


def fidelity(a: WaveField, b: WaveField) -> float:
    """|<a|b>|^2 / (<a|a><b|b>), insensitive to global phase."""
    overlap = inner_product(a, b)
    return abs(overlap) ** 2 / (norm(a) ** 2 * norm(b) ** 2)


def normalized(field: WaveField) -> WaveField:
    n = norm(field)
    if n == 0.0 or not math.isfinite(n):
        raise ValueError("cannot normalize a field with zero norm")
    return field.scaled(1.0 / n)


def _gaussian_factor(
    x: np.ndarray,
    center: float,
    sigma: float,
    k: float,
    t: float,
    hbar: float,
    mass: float,
) -> np.ndarray:
    tau = hbar * t / (2 * mass * sigma**2)
    z = 1 + 1j * tau
    drift = hbar * k * t / mass
    return (
        (2 * np.pi * sigma**2) ** -0.25
        / np.sqrt(z)
        * np.exp(
            -((x - center - drift) ** 2) / (4 * sigma**2 * z)
            + 1j * k * (x - center)
            - 1j * hbar * k**2 * t / (2 * mass)
        )
    )


def free_gaussian(
    grid: Grid,
    center: Vector,
    sigma: float,
    wavevector: Optional[Vector] = None,
    time: float = 0.0,
    *,
    hbar: float = 1.0,
    mass: float = 1.0,
) -> WaveField:
    """Exact free evolution of a Gaussian packet prepared at t=0.

    The width grows as ``sigma * sqrt(1 + (hbar t / 2 m sigma^2)^2)``.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    c = _as_vector(center, grid.dims, "center")
    k = _as_vector(wavevector, grid.dims, "wavevector")
    amplitude = np.ones(grid.shape, dtype=complex)
    for axis, x in enumerate(grid.mesh()):
        amplitude = amplitude * _gaussian_factor(
            x, c[axis], sigma, k[axis], time, hbar, mass
        )
    return WaveField(grid, amplitude, time, hbar, mass)


def gaussian_packet(
    grid: Grid,
    center: Vector,
    sigma: float,
    wavevector: Optional[Vector] = None,
    *,
    hbar: float = 1.0,
    mass: float = 1.0,
) -> WaveField:
    """Normal-density packet with a plane-wave phase ``k.(x - center)``."""
    field = free_gaussian(grid, center, sigma, wavevector, hbar=hbar, mass=mass)
    c = _as_vector(center, grid.dims, "center")
    for axis in range(grid.dims):
        margin = min(c[axis] - grid.mins[axis], grid.maxs[axis] - c[axis])
        if margin < PACKET_MARGIN * sigma:
            log.warning(
                "Gaussian packet is %.3g sigma from the boundary on axis %d",
                margin / sigma,
                axis,
            )
    warn_boundary_decay(field, "Gaussian packet")
    return normalized(field)


def plane_wave(
    grid: Grid,
    wavevector: Vector,
    *,
    hbar: float = 1.0,
    mass: float = 1.0,
) -> WaveField:
    k = _as_vector(wavevector, grid.dims, "wavevector")
    for axis, period in enumerate(grid.periods):
        turns = k[axis] * period / (2 * np.pi)
        if abs(turns - round(turns)) > 1e-9:
            log.warning(
                "wavevector %.6g is not commensurate with the period %.6g on axis %d",
                k[axis],
                period,
                axis,
            )
    phase = sum(k[axis] * x for axis, x in enumerate(grid.mesh()))
    amplitude = np.exp(1j * phase) / math.sqrt(grid.volume)
    return WaveField(grid, amplitude, 0.0, hbar, mass)


def _hermite_function(x: np.ndarray, level: int, alpha: float) -> np.ndarray:
    # Orthonormal Hermite functions by the stable three-term recurrence
    y = math.sqrt(alpha) * x
    prev = np.zeros_like(x)
    cur = (alpha / np.pi) ** 0.25 * np.exp(-(y**2) / 2)
    for n in range(level):
        prev, cur = cur, (
            math.sqrt(2 / (n + 1)) * y * cur - math.sqrt(n / (n + 1)) * prev
        )
    return cur


def harmonic_eigenstate(
    grid: Grid,
    level: Union[int, Sequence[int]] = 0,
    omega: float = 1.0,
    center: Optional[Vector] = None,
    *,
    hbar: float = 1.0,
    mass: float = 1.0,
) -> WaveField:
    """Stationary state of the isotropic oscillator.

    An integer level excites the first axis only.
    """
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega}")
    if isinstance(level, int):
        levels = [level] + [0] * (grid.dims - 1)
    else:
        levels = [int(n) for n in level]
    if len(levels) != grid.dims or min(levels) < 0:
        raise ValueError(f"invalid oscillator levels {levels}")
    c = _as_vector(center, grid.dims, "center")
    alpha = mass * omega / hbar
    amplitude = np.ones(grid.shape, dtype=complex)
    for axis, x in enumerate(grid.mesh()):
        amplitude = amplitude * _hermite_function(x - c[axis], levels[axis], alpha)
    field = WaveField(grid, amplitude, 0.0, hbar, mass)
    warn_boundary_decay(field, "oscillator eigenstate")
    return normalized(field)


def harmonic_energy(
    level: Union[int, Sequence[int]], omega: float, dims: int, hbar: float = 1.0
) -> float:
    total = level if isinstance(level, int) else sum(level)
    return hbar * omega * (total + dims / 2)


def vortex_state(
    grid: Grid,
    winding: int = 1,
    center: Optional[Vector] = None,
    width: float = 1.0,
    *,
    hbar: float = 1.0,
    mass: float = 1.0,
) -> WaveField:
    """``(x + i y)^n exp(-r^2 / 2 w^2)``, a phase vortex of winding ``n``."""
    if grid.dims != 2:
        raise ValueError("a vortex state needs a 2D grid")
    if width <= 0:
        raise ValueError(f"width must be positive, got {width}")
    c = _as_vector(center, 2, "center")
    x, y = grid.mesh()
    z = (x - c[0]) + 1j * (y - c[1])
    if winding < 0:
        z = np.conj(z)
    r2 = np.abs(z) ** 2
    amplitude = z ** abs(winding) * np.exp(-r2 / (2 * width**2))
    field = WaveField(grid, amplitude, 0.0, hbar, mass)
    warn_boundary_decay(field, "vortex state")
    return normalized(field)


def superpose(
    fields: Sequence[WaveField], weights: Optional[Sequence[complex]] = None
) -> WaveField:
    """Weighted pointwise sum renormalized to unit norm."""
    if not fields:
        raise ValueError("nothing to superpose")
    if weights is None:
        weights = [1.0] * len(fields)
    if len(weights) != len(fields):
        raise ValueError(f"{len(fields)} fields but {len(weights)} weights")
    check_same_grid(*fields)
    first = fields[0]
    for other in fields[1:]:
        if other.time != first.time:
            raise FieldMismatchError(
                f"time stamps differ: {first.time} != {other.time}"
            )
    amplitude = sum(w * f.amplitude for w, f in zip(weights, fields))
    total = first.evolved(amplitude, first.time)
    if norm(total) <= 1e-300:
        raise ValueError("superposition is identically zero")
    return normalized(total)


def gaussian_pair(
    grid: Grid,
    centers: Sequence[Vector],
    sigma: float,
    wavevectors: Optional[Sequence[Optional[Vector]]] = None,
    weights: Optional[Sequence[complex]] = None,
    *,
    hbar: float = 1.0,
    mass: float = 1.0,
) -> WaveField:
    """Two displaced Gaussian packets, the two-path superposition."""
    if len(centers) != 2:
        raise ValueError("a pair needs exactly two centers")
    ks = wavevectors if wavevectors is not None else [None, None]
    packets = [
        gaussian_packet(grid, c, sigma, k, hbar=hbar, mass=mass)
        for c, k in zip(centers, ks)
    ]
    return superpose(packets, weights)
