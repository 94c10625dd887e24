# Lattice path integral
#
# The propagator over time T is the M-slice product of short-time kernels
#
#   K(x', x) = (2 pi i hbar tau / m)^(-1/2) exp{(i/hbar)[m (x'-x)^2 / 2tau - U tau]}
#
# integrated over the M-1 intermediate points.  Each integration is a
# convolution with the free kernel, evaluated with FFTs on a uniform
# quadrature grid with trapezoid weights.  A small angle theta rotates the
# slice duration, tau = dt exp(-i theta), which damps the oscillatory tails;
# results are then compared with the exact kernels at the rotated time.

from dataclasses import dataclass, replace

import cmath
import logging
import math
import numpy as np
import scipy.fft
from scipy.signal import fftconvolve
from typing import Callable, List, Optional, Tuple

from .bohm import observed_order
from .evolve import kinetic_symbol
from .fields import WaveField
from .grid import MAX_POINTS, Grid, make_grid
from .potentials import (
    ConstantPotential,
    FreePotential,
    HarmonicPotential,
    Potential,
    PotentialSpec,
)
from .types import ComplexArray, PotentialRule


log = logging.getLogger(__name__)


MAX_THETA = 0.2
# exp(-ALIAS_EXPONENT) bounds both the aliasing and the truncation error
ALIAS_EXPONENT = 30.0
BOUNDARY_MASS = 1e-6
# damping angles compared by theta_robustness
ROBUSTNESS_THETAS = (0.01, 0.04)


class QuadratureError(RuntimeError):
    pass


class NoOracleError(LookupError):
    pass


Sampler = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class LatticeSpec:
    slices: int
    total_time: float
    theta: float = 0.0
    rule: PotentialRule = PotentialRule.ENDPOINT
    hbar: float = 1.0
    mass: float = 1.0
    # explicit quadrature grid: half width around the end point and spacing
    half_width: Optional[float] = None
    spacing: Optional[float] = None

    def __post_init__(self) -> None:
        if self.slices < 1:
            raise ValueError(f"slice count must be >= 1, got {self.slices}")
        if not self.total_time > 0:
            raise ValueError(f"total time must be positive, got {self.total_time}")
        if not 0 <= self.theta <= MAX_THETA:
            raise ValueError(f"theta must lie in [0, {MAX_THETA}], got {self.theta}")
        if (self.half_width is None) != (self.spacing is None):
            raise ValueError("half_width and spacing go together")

    @property
    def delta_t(self) -> float:
        return self.total_time / self.slices

    @property
    def tau(self) -> complex:
        """Rotated slice duration."""
        return self.delta_t * complex(math.cos(self.theta), -math.sin(self.theta))

    @property
    def rotated_time(self) -> complex:
        return self.total_time * complex(math.cos(self.theta), -math.sin(self.theta))


def sampler(spec: PotentialSpec, mass: float = 1.0) -> Sampler:
    """1D potential as a function of position."""

    def fn(x: np.ndarray) -> np.ndarray:
        values = spec.evaluate([np.asarray(x, dtype=float)], mass)
        return np.asarray(values, dtype=float)

    return fn


def _prefactor(tau: complex, hbar: float, mass: float) -> complex:
    return 1 / cmath.sqrt(2j * math.pi * hbar * tau / mass)


def _free_part(d: np.ndarray, tau: complex, hbar: float, mass: float) -> np.ndarray:
    ret: np.ndarray = np.exp(1j * mass * d**2 / (2 * hbar * tau))
    return _prefactor(tau, hbar, mass) * ret


def short_time_kernel(
    x_next: np.ndarray,
    x_prev: np.ndarray,
    potential: Sampler,
    delta_t: float,
    *,
    theta: float = 0.0,
    rule: PotentialRule = PotentialRule.ENDPOINT,
    hbar: float = 1.0,
    mass: float = 1.0,
) -> np.ndarray:
    """One-slice amplitude; the potential is taken at the earlier point or averaged."""
    if not delta_t > 0:
        raise ValueError(f"delta_t must be positive, got {delta_t}")
    tau = delta_t * complex(math.cos(theta), -math.sin(theta))
    x_next = np.asarray(x_next, dtype=float)
    x_prev = np.asarray(x_prev, dtype=float)
    if PotentialRule(rule) == PotentialRule.ENDPOINT:
        u = potential(x_prev)
    else:
        u = 0.5 * (potential(x_prev) + potential(x_next))
    ret: np.ndarray = np.exp(-1j * u * tau / hbar)
    return _free_part(x_next - x_prev, tau, hbar, mass) * ret


# #### Exact kernels ####


def free_kernel(
    x_end: float, x_start: float, time: complex, hbar: float = 1.0, mass: float = 1.0
) -> complex:
    return complex(
        np.sqrt(mass / (2j * math.pi * hbar * time))
        * np.exp(1j * mass * (x_end - x_start) ** 2 / (2 * hbar * time))
    )


def mehler_kernel(
    x_end: float,
    x_start: float,
    time: complex,
    omega: float,
    hbar: float = 1.0,
    mass: float = 1.0,
) -> complex:
    """Oscillator propagator, valid for 0 < Re(omega T) < pi."""
    sin = np.sin(omega * time)
    cos = np.cos(omega * time)
    phase = (
        1j
        * mass
        * omega
        * ((x_start**2 + x_end**2) * cos - 2 * x_start * x_end)
        / (2 * hbar * sin)
    )
    return complex(np.sqrt(mass * omega / (2j * math.pi * hbar * sin)) * np.exp(phase))


def exact_kernel(
    spec: PotentialSpec,
    x_end: float,
    x_start: float,
    time: complex,
    hbar: float = 1.0,
    mass: float = 1.0,
) -> complex:
    if isinstance(spec, FreePotential):
        return free_kernel(x_end, x_start, time, hbar, mass)
    if isinstance(spec, ConstantPotential):
        return free_kernel(x_end, x_start, time, hbar, mass) * complex(
            np.exp(-1j * spec.value * time / hbar)
        )
    if isinstance(spec, HarmonicPotential):
        c = spec.center[0] if spec.center else 0.0
        return mehler_kernel(x_end - c, x_start - c, time, spec.omega, hbar, mass)
    raise NoOracleError(f"no exact propagator for a {spec.kind.value} potential")


# #### Quadrature ####


def lattice_grid(
    lattice: LatticeSpec, x_start: float, x_end: float, max_points: int = MAX_POINTS
) -> Tuple[Grid, int]:
    """Quadrature grid with ``x_end`` on a node; returns the grid and that index.

    Without explicit sizes the spacing resolves the damped free kernel of one
    slice and the half width covers the damped spread over the full time,
    both to ``exp(-ALIAS_EXPONENT)``.
    """
    if lattice.spacing is not None and lattice.half_width is not None:
        h, half = lattice.spacing, lattice.half_width
    else:
        if lattice.theta == 0:
            raise QuadratureError("theta = 0 needs an explicit quadrature grid")
        s = math.sin(lattice.theta)
        ratio = lattice.hbar / lattice.mass
        h = math.pi * math.sqrt(ratio * lattice.delta_t * s / (2 * ALIAS_EXPONENT))
        half = abs(x_end - x_start) + math.sqrt(
            2 * ratio * lattice.total_time * ALIAS_EXPONENT / s
        )
    below = int(math.ceil(half / h))
    n = 2 * below + 1
    if n > max_points:
        raise QuadratureError(f"quadrature grid of {n} points exceeds {max_points}")
    lo = x_end - below * h
    return make_grid(1, [(lo, lo + (n - 1) * h)], n, max_points=max_points), below


class _Lattice:
    """Convolution form of the slice product on one quadrature grid."""

    def __init__(self, lattice: LatticeSpec, potential: Sampler, grid: Grid) -> None:
        self.lattice = lattice
        self.grid = grid
        self.x = grid.axes[0]
        h = grid.spacing[0]
        n = grid.points[0]
        offsets = h * np.arange(-(n - 1), n)
        tau = lattice.tau
        self._kernel = _free_part(offsets, tau, lattice.hbar, lattice.mass)
        u = potential(self.x)
        if lattice.rule == PotentialRule.ENDPOINT:
            self._before = np.exp(-1j * u * tau / lattice.hbar)
            self._after = np.ones_like(self._before)
        else:
            half = np.exp(-0.5j * u * tau / lattice.hbar)
            self._before = half
            self._after = half
        self._weights = np.full(n, h)
        self._weights[[0, -1]] = h / 2

    def convolve(self, values: ComplexArray) -> ComplexArray:
        """One slice applied to a function of the earlier point."""
        n = len(values)
        full = fftconvolve(self._kernel, self._before * self._weights * values)
        return self._after * full[n - 1 : 2 * n - 1]  # type: ignore[no-any-return]

    def convolve_transposed(self, values: ComplexArray) -> ComplexArray:
        """One slice applied to a function of the later point."""
        n = len(values)
        full = fftconvolve(self._kernel, self._after * self._weights * values)
        return self._before * full[n - 1 : 2 * n - 1]  # type: ignore[no-any-return]

    def _cross_kernel(self, target: "_Lattice") -> ComplexArray:
        # offsets target.x[i] - self.x[j] share the spacing, so the final
        # slice onto another grid is still a single convolution
        h = self.grid.spacing[0]
        if not math.isclose(h, target.grid.spacing[0], rel_tol=1e-9):
            raise QuadratureError("quadrature grids use different spacings")
        count = len(self.x) + len(target.x) - 1
        offsets = (target.x[0] - self.x[-1]) + h * np.arange(count)
        lattice = self.lattice
        return _free_part(offsets, lattice.tau, lattice.hbar, lattice.mass)

    def convolve_onto(self, values: ComplexArray, target: "_Lattice") -> ComplexArray:
        """Final forward slice, evaluated at the nodes of ``target``."""
        n = len(values)
        full = fftconvolve(
            self._cross_kernel(target), self._before * self._weights * values
        )
        ret: ComplexArray = target._after * full[n - 1 : n - 1 + len(target.x)]
        return ret

    def convolve_transposed_onto(
        self, values: ComplexArray, target: "_Lattice"
    ) -> ComplexArray:
        """Final backward slice, evaluated at the nodes of ``target``."""
        n = len(values)
        full = fftconvolve(
            self._cross_kernel(target), self._after * self._weights * values
        )
        ret: ComplexArray = target._before * full[n - 1 : n - 1 + len(target.x)]
        return ret

    def first_slice(self, x_start: float, potential: Sampler) -> ComplexArray:
        tau = self.lattice.tau
        hbar = self.lattice.hbar
        start = potential(np.array([x_start]))[0]
        free = _free_part(self.x - x_start, tau, hbar, self.lattice.mass)
        ret: ComplexArray
        if self.lattice.rule == PotentialRule.ENDPOINT:
            ret = free * np.exp(-1j * start * tau / hbar)
        else:
            ret = free * np.exp(-0.5j * start * tau / hbar) * self._after
        return ret

    def last_slice(self, x_end: float, potential: Sampler) -> ComplexArray:
        tau = self.lattice.tau
        hbar = self.lattice.hbar
        end = potential(np.array([x_end]))[0]
        free = _free_part(x_end - self.x, tau, hbar, self.lattice.mass)
        ret: ComplexArray = free * self._before
        if self.lattice.rule == PotentialRule.SYMMETRIC:
            ret = ret * np.exp(-0.5j * end * tau / hbar)
        return ret

    def forward(self, x_start: float, slices: int, potential: Sampler) -> ComplexArray:
        """G(x, x_start) after ``slices`` slices, as a function of x."""
        values = self.first_slice(x_start, potential)
        for _ in range(slices - 1):
            values = self.convolve(values)
        return values

    def backward(self, x_end: float, slices: int, potential: Sampler) -> ComplexArray:
        """G(x_end, y) after ``slices`` slices, as a function of y."""
        values = self.last_slice(x_end, potential)
        for _ in range(slices - 1):
            values = self.convolve_transposed(values)
        return values

    def check_boundary(self, values: ComplexArray) -> None:
        mag = np.abs(values)
        peak = float(mag.max())
        edge = max(float(mag[0]), float(mag[-1]))
        if peak > 0 and edge / peak > BOUNDARY_MASS:
            raise QuadratureError(
                f"quadrature grid too small: boundary amplitude ratio {edge / peak:.3g}"
            )

    def integrate(self, values: ComplexArray) -> complex:
        return complex(np.sum(self._weights * values))


def lattice_propagator(
    lattice: LatticeSpec,
    potential: PotentialSpec,
    x_start: float,
    x_end: float,
) -> complex:
    """G(x_end, x_start; T) on the M-slice lattice."""
    fn = sampler(potential, lattice.mass)
    if lattice.slices == 1:
        return complex(
            short_time_kernel(
                np.array(x_end),
                np.array(x_start),
                fn,
                lattice.delta_t,
                theta=lattice.theta,
                rule=lattice.rule,
                hbar=lattice.hbar,
                mass=lattice.mass,
            )
        )
    grid, index = lattice_grid(lattice, x_start, x_end)
    lat = _Lattice(lattice, fn, grid)
    values = lat.forward(x_start, lattice.slices, fn)
    lat.check_boundary(values)
    return complex(values[index])


def propagate_state(
    field: WaveField, potential: Potential, lattice: LatticeSpec
) -> WaveField:
    """Apply the M-slice lattice kernel to a 1D field on its own grid.

    The free part of every slice is the convolution with the free kernel,
    applied as its Fourier multiplier exp(-i hbar k^2 tau / 2m) between the
    potential phase factors of the rule.  At theta = 0 each slice is unitary.
    """
    if field.grid.dims != 1:
        raise ValueError("lattice propagation is one-dimensional")
    if potential.grid != field.grid:
        raise ValueError("potential is sampled on a different grid")
    if (lattice.hbar, lattice.mass) != (field.hbar, field.mass):
        raise ValueError("lattice and field use different hbar or mass")
    tau, hbar = lattice.tau, lattice.hbar
    drift = np.exp(-1j * kinetic_symbol(field.grid, hbar, field.mass) * tau / hbar)
    if lattice.rule == PotentialRule.ENDPOINT:
        before = np.exp(-1j * potential.values * tau / hbar)
        after = np.ones_like(before)
    else:
        before = after = np.exp(-0.5j * potential.values * tau / hbar)
    psi = np.array(field.amplitude)
    for _ in range(lattice.slices):
        psi = after * scipy.fft.ifft(drift * scipy.fft.fft(before * psi))
    return field.evolved(psi, field.time + lattice.total_time)


# #### Studies ####


@dataclass(frozen=True)
class ConvergenceRow:
    slices: int
    value: complex
    exact: complex
    error: float
    order: Optional[float]


def convergence_study(
    potential: PotentialSpec,
    x_start: float,
    x_end: float,
    total_time: float,
    slice_counts: List[int],
    *,
    theta: float = 0.02,
    rule: PotentialRule = PotentialRule.ENDPOINT,
    hbar: float = 1.0,
    mass: float = 1.0,
) -> List[ConvergenceRow]:
    """Relative error against the exact kernel for increasing slice counts."""
    if any(b <= a for a, b in zip(slice_counts, slice_counts[1:])):
        raise ValueError("slice counts must be increasing")
    rows: List[ConvergenceRow] = []
    for m in slice_counts:
        lattice = LatticeSpec(m, total_time, theta, rule, hbar, mass)
        exact = exact_kernel(
            potential, x_end, x_start, lattice.rotated_time, hbar, mass
        )
        value = lattice_propagator(lattice, potential, x_start, x_end)
        error = abs(value - exact) / abs(exact)
        order = None
        if rows:
            prev = rows[-1]
            order = observed_order(prev.error, error, m / prev.slices)
        rows.append(ConvergenceRow(m, value, exact, error, order))
        log.info("M=%d relative error %.3g", m, error)
    return rows


@dataclass(frozen=True)
class ThetaRobustness:
    slices: int
    # (theta, relative error against the exact kernel at the rotated time)
    errors: Tuple[Tuple[float, float], ...]

    @property
    def spread(self) -> float:
        values = [error for _, error in self.errors]
        return max(values) - min(values)


def theta_robustness(
    potential: PotentialSpec,
    x_start: float,
    x_end: float,
    total_time: float,
    slices: int,
    *,
    thetas: Tuple[float, ...] = ROBUSTNESS_THETAS,
    rule: PotentialRule = PotentialRule.ENDPOINT,
    hbar: float = 1.0,
    mass: float = 1.0,
) -> ThetaRobustness:
    """Relative lattice errors of one slice count at several damping angles.

    Each angle is compared with the exact kernel at its own rotated time.
    """
    errors = []
    for theta in thetas:
        lattice = LatticeSpec(slices, total_time, theta, rule, hbar, mass)
        exact = exact_kernel(
            potential, x_end, x_start, lattice.rotated_time, hbar, mass
        )
        value = lattice_propagator(lattice, potential, x_start, x_end)
        errors.append((theta, abs(value - exact) / abs(exact)))
    ret = ThetaRobustness(slices, tuple(errors))
    log.info("M=%d theta spread of relative errors %.3g", slices, ret.spread)
    return ret


@dataclass(frozen=True)
class SemigroupReport:
    direct: complex
    composed: complex
    split: int

    @property
    def defect(self) -> float:
        return abs(self.direct - self.composed) / abs(self.direct)


def _part(
    part: LatticeSpec,
    potential: Sampler,
    anchor: float,
    middle: _Lattice,
    forward: bool,
) -> ComplexArray:
    """G over ``part`` between ``anchor`` and the nodes of ``middle``.

    All slices but the last run on a quadrature grid of the part's own.
    """
    if part.slices == 1:
        if forward:
            return middle.first_slice(anchor, potential)
        return middle.last_slice(anchor, potential)
    grid, _ = lattice_grid(part, anchor, anchor)
    own = _Lattice(part, potential, grid)
    if forward:
        values = own.forward(anchor, part.slices - 1, potential)
        own.check_boundary(values)
        return own.convolve_onto(values, middle)
    values = own.backward(anchor, part.slices - 1, potential)
    own.check_boundary(values)
    return own.convolve_transposed_onto(values, middle)


def semigroup_check(
    lattice: LatticeSpec,
    potential: PotentialSpec,
    x_start: float,
    x_end: float,
    t_mid: float,
) -> SemigroupReport:
    """Compose G(T - t_mid) with G(t_mid) over the middle point.

    The two parts are separate lattices with the slice duration of
    ``lattice``, so the split must fall on a slice boundary.  Each part is
    integrated on its own quadrature grid and the middle point on the grid
    of the direct pass.
    """
    if not 0 < t_mid < lattice.total_time:
        raise ValueError(f"t_mid must lie in (0, {lattice.total_time})")
    split = int(round(t_mid / lattice.delta_t))
    if not 1 <= split < lattice.slices or not math.isclose(
        split * lattice.delta_t, t_mid, rel_tol=1e-9
    ):
        raise ValueError(f"t_mid={t_mid} is not a slice boundary of the lattice")
    fn = sampler(potential, lattice.mass)
    grid, index = lattice_grid(lattice, x_start, x_end)
    middle = _Lattice(lattice, fn, grid)
    direct = middle.forward(x_start, lattice.slices, fn)
    middle.check_boundary(direct)
    early = replace(lattice, slices=split, total_time=t_mid)
    late = replace(
        lattice,
        slices=lattice.slices - split,
        total_time=lattice.total_time - t_mid,
    )
    first = _part(early, fn, x_start, middle, forward=True)
    second = _part(late, fn, x_end, middle, forward=False)
    composed = middle.integrate(second * first)
    log.info("semigroup split %d of %d slices", split, lattice.slices)
    return SemigroupReport(complex(direct[index]), composed, split)
