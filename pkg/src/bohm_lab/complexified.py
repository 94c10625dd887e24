# Complexified mechanics
#
# The action J and the quantum entropy S_Q combine into the complex action
# JJ = J + i hbar S_Q with momentum PP = grad J + i hbar grad S_Q.  The
# complexified coordinate q + i eps n with eps = s hbar / 2m enters the
# potential only through its second-order expansion.
#
# The two Taylor identifications of the expansion coefficients are
# reported as paired fields and never asserted.

from dataclasses import dataclass

import logging
import math
import numpy as np
from typing import Optional, Sequence, Tuple, Union

from .bohm import (
    DEFAULT_RHO_FLOOR,
    BohmFields,
    MissingActionError,
    NodeRegionError,
    centered_difference,
    decompose,
    density_mask,
    masked_l2,
)
from .derivatives import Backend
from .fields import WaveField
from .potentials import Potential
from .types import BoolArray, ComplexArray, DerivativeBackend, Point, RealArray


log = logging.getLogger(__name__)


Direction = Union[str, Sequence[float]]


def complex_action(bohm: BohmFields) -> ComplexArray:
    """J + i hbar S_Q on the masked region, zero elsewhere."""
    if bohm.J is None:
        raise MissingActionError("the decomposition carries no action field")
    ret = bohm.J.values + 1j * bohm.hbar * bohm.S_Q
    return np.where(bohm.mask, ret, 0.0)  # type: ignore[no-any-return]


def complex_momentum(bohm: BohmFields) -> ComplexArray:
    return bohm.grad_J + 1j * bohm.hbar * bohm.grad_S_Q  # type: ignore[no-any-return]


def amplitude_from_action(
    action: ComplexArray, hbar: float, reference_phase: float = 0.0
) -> ComplexArray:
    """exp(i JJ / hbar), whose modulus is exp(-S_Q)."""
    ret: ComplexArray = np.exp(1j * action / hbar + 1j * reference_phase)
    return ret


def probe_direction(
    potential: Potential, direction: Direction = "auto"
) -> Tuple[RealArray, BoolArray]:
    """Unit vector field n and the mask where it is defined.

    ``"auto"`` aligns n with grad U and leaves it undefined where grad U
    vanishes; a fixed vector is normalized and used everywhere.
    """
    grid = potential.grid
    if isinstance(direction, str):
        if direction != "auto":
            raise ValueError(f"unknown probe direction '{direction}'")
        grad = potential.gradient
        size = np.sqrt(np.sum(grad**2, axis=0))
        defined = size > 0
        n = np.zeros_like(grad)
        np.divide(grad, size, out=n, where=np.broadcast_to(defined, grad.shape))
        return n, defined
    vec = np.asarray(direction, dtype=float)
    if vec.shape != (grid.dims,):
        raise ValueError(f"probe direction must have {grid.dims} components")
    length = float(np.linalg.norm(vec))
    if length == 0:
        raise ValueError("probe direction must be non-zero")
    unit = (vec / length).reshape(-1, *([1] * grid.dims))
    n = np.broadcast_to(unit, (grid.dims, *grid.shape))
    return np.array(n), np.ones(grid.shape, dtype=bool)


@dataclass(frozen=True, eq=False)
class ComplexifiedState:
    action: ComplexArray
    momentum: ComplexArray
    direction: RealArray
    direction_defined: BoolArray
    epsilon_radius: float
    mask: BoolArray
    hbar: float
    mass: float

    @property
    def J(self) -> RealArray:
        return self.action.real  # type: ignore[no-any-return]

    @property
    def S_Q(self) -> RealArray:
        return self.action.imag / self.hbar  # type: ignore[no-any-return]

    @property
    def displacement(self) -> RealArray:
        """Imaginary coordinate shift eps n."""
        return self.epsilon_radius * self.direction  # type: ignore[no-any-return]


def complexify(
    bohm: BohmFields,
    potential: Potential,
    reverse_velocity: float,
    direction: Direction = "auto",
) -> ComplexifiedState:
    n, defined = probe_direction(potential, direction)
    return ComplexifiedState(
        action=complex_action(bohm),
        momentum=complex_momentum(bohm),
        direction=n,
        direction_defined=defined,
        epsilon_radius=reverse_velocity * bohm.hbar / (2 * bohm.mass),
        mask=bohm.mask,
        hbar=bohm.hbar,
        mass=bohm.mass,
    )


def gradient_square_identity(bohm: BohmFields) -> float:
    """Max defect of PP^2/2m against its expansion in grad J and grad S_Q."""
    hbar, mass = bohm.hbar, bohm.mass
    pp = complex_momentum(bohm)
    lhs = np.sum(pp * pp, axis=0) / (2 * mass)
    rhs = (
        np.sum(bohm.grad_J**2, axis=0) / (2 * mass)
        + 1j * hbar * np.sum(bohm.grad_J * bohm.grad_S_Q, axis=0) / mass
        - hbar**2 * np.sum(bohm.grad_S_Q**2, axis=0) / (2 * mass)
    )
    return float(np.max(np.where(bohm.mask, np.abs(lhs - rhs), 0.0)))


def expanded_potential(
    potential: Potential,
    direction: RealArray,
    reverse_velocity: float,
    hbar: float,
    mass: float,
) -> ComplexArray:
    """U(q + i eps n) to second order, eps = s hbar / 2m."""
    s = reverse_velocity
    first = np.sum(direction * potential.gradient, axis=0)
    return (  # type: ignore[no-any-return]
        potential.values
        + 1j * hbar * s / (2 * mass) * first
        - hbar**2 / (2 * mass) * s**2 / (2 * mass) * potential.laplacian
    )


# #### Residuals and probes ####


@dataclass(frozen=True, eq=False)
class ComplexResidual:
    values: ComplexArray
    mask: BoolArray
    real_summary: float
    imag_summary: float
    curvature_gap: RealArray
    time: float
    index: int

    @property
    def summary(self) -> float:
        return math.hypot(self.real_summary, self.imag_summary)


def complexified_hj_residual(
    snapshots: Sequence[WaveField],
    potential: Potential,
    index: int,
    reverse_velocity: float,
    direction: Direction = "auto",
    backend: Backend = DerivativeBackend.SPECTRAL,
    rel_floor: float = DEFAULT_RHO_FLOOR,
) -> ComplexResidual:
    """dJJ/dt + PP^2/2m + U(q + i eps n) with the curvature term kept exact.

    The second-order term of U(q + i eps n) is replaced by hbar^2/2m lap S_Q,
    so the real part equals the Hamilton-Jacobi residual.  Adding
    ``curvature_gap`` restores the fully expanded potential.  The imaginary
    part keeps the first-order expansion term literally.
    """
    c = centered_difference(snapshots, index)
    if potential.grid != c.cur.grid:
        raise ValueError("potential is sampled on a different grid")
    bohm = decompose(c.cur, backend=backend, rel_floor=rel_floor, with_action=False)
    hbar, mass, s = bohm.hbar, bohm.mass, reverse_velocity
    mask = (
        bohm.mask
        & density_mask(np.abs(c.prev.amplitude) ** 2, rel_floor)
        & density_mask(np.abs(c.next.amplitude) ** 2, rel_floor)
    )
    n, _ = probe_direction(potential, direction)

    d_J = hbar * c.d_phase_dt()
    d_S_Q = np.zeros_like(bohm.rho)
    np.divide(-c.d_rho_dt(), 2 * bohm.rho, out=d_S_Q, where=bohm.mask)
    pp = complex_momentum(bohm)
    kinetic = np.sum(pp * pp, axis=0) / (2 * mass)
    first = np.sum(n * potential.gradient, axis=0)
    coef = hbar**2 / (2 * mass)

    values = (
        d_J
        + 1j * hbar * d_S_Q
        + kinetic
        + potential.values
        + 1j * hbar * s / (2 * mass) * first
        + coef * bohm.lap_S_Q
    )
    values = np.where(mask, values, 0.0)
    gap = np.where(
        mask, -coef * (s**2 / (2 * mass) * potential.laplacian + bohm.lap_S_Q), 0.0
    )
    grid = c.cur.grid
    ret = ComplexResidual(
        values=values,
        mask=mask,
        real_summary=masked_l2(values.real, mask, grid),
        imag_summary=masked_l2(values.imag, mask, grid),
        curvature_gap=gap,
        time=c.cur.time,
        index=index,
    )
    log.debug(
        "complexified residual at t=%.6g: re %.6g im %.6g",
        ret.time,
        ret.real_summary,
        ret.imag_summary,
    )
    return ret


@dataclass(frozen=True, eq=False)
class ProbePair:
    name: str
    lhs: RealArray
    rhs: RealArray
    mask: BoolArray

    @property
    def discrepancy(self) -> RealArray:
        ret: RealArray = np.where(self.mask, self.lhs - self.rhs, 0.0)
        return ret

    @property
    def max_discrepancy(self) -> float:
        if not self.mask.any():
            return 0.0
        return float(np.max(np.abs(self.discrepancy)))

    @property
    def correlation(self) -> float:
        """Pearson correlation over the mask; nan when either side is constant."""
        a = self.lhs[self.mask]
        b = self.rhs[self.mask]
        if a.size < 2 or np.ptp(a) == 0 or np.ptp(b) == 0:
            return math.nan
        return float(np.corrcoef(a, b)[0, 1])


def taylor_probe_b1(
    bohm: BohmFields, potential: Potential, reverse_velocity: float
) -> ProbePair:
    """(s/2m) n.grad U beside -div(v)/2, n along grad U."""
    n, _ = probe_direction(potential, "auto")
    lhs = reverse_velocity / (2 * bohm.mass) * np.sum(n * potential.gradient, axis=0)
    return ProbePair("b1", lhs, -0.5 * bohm.div_v, bohm.mask)


def taylor_probe_b2(
    bohm: BohmFields, potential: Potential, reverse_velocity: float
) -> ProbePair:
    """-(s^2/2m) lap U beside lap S_Q."""
    lhs = -(reverse_velocity**2) / (2 * bohm.mass) * potential.laplacian
    return ProbePair("b2", lhs, bohm.lap_S_Q, bohm.mask)


# #### Circulation ####


@dataclass(frozen=True)
class Circulation:
    value: float
    hbar: float
    corners: Tuple[Tuple[int, int], Tuple[int, int]]

    @property
    def turns(self) -> float:
        """Circulation in units of 2 pi hbar."""
        return self.value / (2 * math.pi * self.hbar)


def _loop_indices(
    lo: Tuple[int, int], hi: Tuple[int, int]
) -> Tuple[np.ndarray, np.ndarray]:
    (i0, j0), (i1, j1) = lo, hi
    ii = np.concatenate(
        [
            np.arange(i0, i1),
            np.full(j1 - j0, i1),
            np.arange(i1, i0, -1),
            np.full(j1 - j0, i0),
        ]
    )
    jj = np.concatenate(
        [
            np.full(i1 - i0, j0),
            np.arange(j0, j1),
            np.full(i1 - i0, j1),
            np.arange(j1, j0, -1),
        ]
    )
    return ii, jj


def circulation(
    field: WaveField,
    loop: Tuple[Point, Point],
    rel_floor: float = DEFAULT_RHO_FLOOR,
) -> Circulation:
    """Line integral of grad J around a counterclockwise axis-aligned rectangle.

    ``loop`` gives two opposite corners; they are snapped to the grid.
    """
    grid = field.grid
    if grid.dims != 2:
        raise ValueError("circulation needs a 2D field")
    a = grid.nearest_index(loop[0])
    b = grid.nearest_index(loop[1])
    lo = (min(a[0], b[0]), min(a[1], b[1]))
    hi = (max(a[0], b[0]), max(a[1], b[1]))
    if lo[0] == hi[0] or lo[1] == hi[1]:
        raise ValueError("loop encloses no grid cell")
    ii, jj = _loop_indices(lo, hi)
    psi = field.amplitude
    mask = density_mask(np.abs(psi) ** 2, rel_floor)
    if not mask[ii, jj].all():
        raise NodeRegionError("loop passes through a node region")
    ring = psi[ii, jj]
    increments = np.angle(np.roll(ring, -1) * np.conj(ring))
    return Circulation(field.hbar * float(increments.sum()), field.hbar, (lo, hi))


# #### Direction rate ####


@dataclass(frozen=True, eq=False)
class EpsilonDot:
    grad_S_Q: RealArray
    n_dot: RealArray
    mask: BoolArray
    drift: float

    @property
    def magnitude(self) -> RealArray:
        return np.sqrt(np.sum(self.n_dot**2, axis=0))  # type: ignore[no-any-return]


def epsilon_dot_check(
    snapshots: Sequence[WaveField],
    index: int,
    reverse_velocity: float,
    backend: Backend = DerivativeBackend.SPECTRAL,
    rel_floor: float = DEFAULT_RHO_FLOOR,
) -> EpsilonDot:
    """Implied rate n' = (2/s) grad S_Q; the unit length of n is not enforced.

    ``drift`` is the largest change of n' between the neighbouring snapshots.
    """
    if not reverse_velocity > 0:
        raise ValueError("reverse velocity must be positive")
    c = centered_difference(snapshots, index)
    rates = []
    for snap in (c.prev, c.cur, c.next):
        bohm = decompose(snap, backend=backend, rel_floor=rel_floor, with_action=False)
        rates.append((bohm.grad_S_Q, bohm.mask))
    (g_prev, m_prev), (g_cur, m_cur), (g_next, m_next) = rates
    scale = 2 / reverse_velocity
    common = m_prev & m_cur & m_next
    drift = np.where(common, np.abs(scale * (g_next - g_prev)), 0.0)
    return EpsilonDot(
        grad_S_Q=g_cur,
        n_dot=scale * g_cur,
        mask=m_cur,
        drift=float(drift.max()) if drift.size else 0.0,
    )


# #### Legendre structure ####


@dataclass(frozen=True, eq=False)
class LegendreReport:
    hamiltonian: ComplexArray
    lagrangian: ComplexArray
    mask: BoolArray
    lagrangian_defect: float
    velocity_defect: float

    @property
    def energy_density(self) -> RealArray:
        return self.hamiltonian.real  # type: ignore[no-any-return]

    @property
    def entropy_production(self) -> RealArray:
        return self.hamiltonian.imag  # type: ignore[no-any-return]


def legendre_identities(
    bohm: BohmFields,
    potential: Potential,
    reverse_velocity: float,
    direction: Direction = "auto",
    step: Optional[float] = None,
) -> LegendreReport:
    """Complex Hamiltonian and Lagrangian with the defects of their Legendre pair.

    dH/dPP is taken by a central complex difference of step ``step``
    (default 1e-4 of the largest momentum) and compared with PP/m.
    """
    mass = bohm.mass
    n, _ = probe_direction(potential, direction)
    pp = complex_momentum(bohm)
    u_c = expanded_potential(potential, n, reverse_velocity, bohm.hbar, mass)

    def hamiltonian(p: ComplexArray) -> ComplexArray:
        return np.sum(p * p, axis=0) / (2 * mass) + u_c  # type: ignore[no-any-return]

    ham = hamiltonian(pp)
    q_dot = pp / mass
    lag = np.sum(pp * q_dot, axis=0) - ham
    mask = bohm.mask
    lag_defect = np.abs(lag - (np.sum(pp * pp, axis=0) / (2 * mass) - u_c))

    if step is None:
        step = 1e-4 * max(float(np.max(np.abs(pp))), 1.0)
    vel_defect = 0.0
    for axis in range(pp.shape[0]):
        shift = np.zeros_like(pp)
        shift[axis] = step
        deriv = (hamiltonian(pp + shift) - hamiltonian(pp - shift)) / (2 * step)
        vel_defect = max(
            vel_defect, float(np.max(np.where(mask, np.abs(deriv - q_dot[axis]), 0.0)))
        )
    return LegendreReport(
        hamiltonian=np.where(mask, ham, 0.0),
        lagrangian=np.where(mask, lag, 0.0),
        mask=mask,
        lagrangian_defect=float(np.max(np.where(mask, lag_defect, 0.0))),
        velocity_defect=vel_defect,
    )


