# Bohmian decomposition
#
# Psi = exp(-S_Q + iJ/hbar) is split into density, action, quantum entropy
# and quantum potential.  Derivatives of rho and S_Q are obtained from the
# derivatives of Psi itself, rho and S_Q are not smooth periodic functions
# once the density floor is applied.

from dataclasses import dataclass

import logging
import math
import numpy as np
from typing import List, Optional, Sequence, Tuple, Union

from .derivatives import Backend, gradient, laplacian
from .evolve import EvolutionPlan, energy_expectation, evolve
from .fields import WaveField, check_same_grid, fidelity, gaussian_packet
from .grid import Grid, make_grid
from .potentials import FreePotential, Potential, build_potential
from .types import (
    BoolArray,
    ComplexArray,
    DerivativeBackend,
    QuantumPotentialForm,
    RealArray,
)


log = logging.getLogger(__name__)


DEFAULT_RHO_FLOOR = 1e-12


class NodeRegionError(ValueError):
    pass


class SeriesEdgeError(IndexError):
    pass


class MissingActionError(LookupError):
    pass


def density(field: WaveField) -> RealArray:
    return np.abs(field.amplitude) ** 2  # type: ignore[no-any-return]


def density_mask(rho: RealArray, rel_floor: float = DEFAULT_RHO_FLOOR) -> BoolArray:
    """Points where rho >= rel_floor * max(rho)."""
    return rho >= rel_floor * float(rho.max())  # type: ignore[no-any-return]


def _safe_divide(num: np.ndarray, den: np.ndarray, mask: BoolArray) -> np.ndarray:
    out = np.zeros(np.broadcast(num, den).shape, dtype=np.result_type(num, den))
    np.divide(num, den, out=out, where=np.broadcast_to(mask, out.shape))
    return out


@dataclass(frozen=True, eq=False)
class _Kinematics:
    """Pointwise products of Psi with its own derivatives."""

    rho: RealArray
    mask: BoolArray
    flux: RealArray  # Im(Psi* grad Psi)
    half_grad_rho: RealArray  # Re(Psi* grad Psi)
    psi_lap: ComplexArray  # Psi* lap Psi
    grad_sq: RealArray  # sum |d Psi|^2


def _kinematics(
    field: WaveField,
    backend: Backend = DerivativeBackend.SPECTRAL,
    rel_floor: float = DEFAULT_RHO_FLOOR,
) -> _Kinematics:
    psi = field.amplitude
    grad = gradient(psi, field.grid, backend)
    lap = laplacian(psi, field.grid, backend)
    rho = np.abs(psi) ** 2
    prod = np.conj(psi) * grad
    return _Kinematics(
        rho=rho,
        mask=density_mask(rho, rel_floor),
        flux=prod.imag,
        half_grad_rho=prod.real,
        psi_lap=np.conj(psi) * lap,
        grad_sq=np.sum(np.abs(grad) ** 2, axis=0),
    )


def _grad_J(kin: _Kinematics, hbar: float) -> RealArray:
    return hbar * _safe_divide(kin.flux, kin.rho, kin.mask)


def _grad_S_Q(kin: _Kinematics) -> RealArray:
    return -_safe_divide(kin.half_grad_rho, kin.rho, kin.mask)


def _curvature_Q(kin: _Kinematics, hbar: float, mass: float) -> RealArray:
    # lap R / R = Re(Psi* lap Psi)/rho + |Im(Psi* grad Psi)/rho|^2
    phase_grad = _safe_divide(kin.flux, kin.rho, kin.mask)
    ratio = _safe_divide(kin.psi_lap.real, kin.rho, kin.mask) + np.sum(
        phase_grad**2, axis=0
    )
    return -(hbar**2) / (2 * mass) * ratio


def _lap_S_Q(kin: _Kinematics) -> RealArray:
    lap_rho_half = kin.psi_lap.real + kin.grad_sq
    grad_log = _safe_divide(kin.half_grad_rho, kin.rho, kin.mask)
    return -_safe_divide(lap_rho_half, kin.rho, kin.mask) + 2 * np.sum(
        grad_log**2, axis=0
    )


def _entropy_Q(kin: _Kinematics, hbar: float, mass: float) -> RealArray:
    grad_s = _grad_S_Q(kin)
    coef = hbar**2 / (2 * mass)
    ret = -coef * np.sum(grad_s**2, axis=0) + coef * _lap_S_Q(kin)
    return np.where(kin.mask, ret, 0.0)


def _div_v(kin: _Kinematics, hbar: float, mass: float) -> RealArray:
    first = _safe_divide(kin.psi_lap.imag, kin.rho, kin.mask)
    second = _safe_divide(
        np.sum(kin.flux * 2 * kin.half_grad_rho, axis=0), kin.rho**2, kin.mask
    )
    return hbar / mass * (first - second)


def phase_gradient(
    field: WaveField,
    backend: Backend = DerivativeBackend.SPECTRAL,
    rel_floor: float = DEFAULT_RHO_FLOOR,
) -> RealArray:
    """grad J = hbar Im(Psi* grad Psi) / rho, zero where rho is below the floor."""
    return _grad_J(_kinematics(field, backend, rel_floor), field.hbar)


def quantum_entropy(
    field: WaveField, rel_floor: float = DEFAULT_RHO_FLOOR
) -> RealArray:
    rho = density(field)
    floor = rel_floor * float(rho.max())
    return -0.5 * np.log(np.maximum(rho, floor))  # type: ignore[no-any-return]


def quantum_potential(
    field: WaveField,
    form: Union[QuantumPotentialForm, str] = QuantumPotentialForm.CURVATURE,
    backend: Backend = DerivativeBackend.SPECTRAL,
    rel_floor: float = DEFAULT_RHO_FLOOR,
) -> RealArray:
    try:
        form = QuantumPotentialForm(form)
    except ValueError:
        raise ValueError(f"unknown quantum potential form '{form}'") from None
    kin = _kinematics(field, backend, rel_floor)
    if form == QuantumPotentialForm.CURVATURE:
        return _curvature_Q(kin, field.hbar, field.mass)
    return _entropy_Q(kin, field.hbar, field.mass)


# #### Action field ####


@dataclass(frozen=True, eq=False)
class ActionField:
    """Line-integrated action with its sheet bookkeeping.

    ``windings`` holds the phase winding of every fully masked-in grid cell;
    a non-zero entry marks a vortex and makes J multivalued.
    """

    values: RealArray
    reference: Tuple[int, ...]
    reference_phase: float
    windings: np.ndarray
    hbar: float

    @property
    def vortex_cells(self) -> List[Tuple[int, ...]]:
        return [tuple(int(i) for i in idx) for idx in np.argwhere(self.windings != 0)]

    @property
    def net_winding(self) -> int:
        return int(self.windings.sum())

    @property
    def multivalued(self) -> bool:
        return bool(np.any(self.windings != 0))

    @property
    def closure_defect(self) -> float:
        """Total loop-closure defect, a multiple of 2 pi hbar."""
        return 2 * math.pi * self.hbar * float(np.abs(self.windings).sum())


def _increments(psi: ComplexArray, mask: BoolArray, axis: int) -> RealArray:
    lo = [slice(None)] * psi.ndim
    hi = [slice(None)] * psi.ndim
    lo[axis] = slice(None, -1)
    hi[axis] = slice(1, None)
    lo_t, hi_t = tuple(lo), tuple(hi)
    inc = np.angle(psi[hi_t] * np.conj(psi[lo_t]))
    return np.where(mask[hi_t] & mask[lo_t], inc, 0.0)  # type: ignore[no-any-return]


def _cumulative(inc: RealArray, axis: int) -> RealArray:
    pad = [(0, 0)] * inc.ndim
    pad[axis] = (1, 0)
    return np.cumsum(np.pad(inc, pad), axis=axis)  # type: ignore[no-any-return]


def action_field(
    field: WaveField,
    reference_point: Optional[Sequence[float]] = None,
    rel_floor: float = DEFAULT_RHO_FLOOR,
) -> ActionField:
    """Integrate the phase one-form along grid lines from a reference point.

    Each grid edge contributes the wrapped phase increment between its
    endpoints, which is the exact line integral of grad J over the edge.
    Edges touching masked-out points contribute nothing.  In 2D the path
    runs along axis 0 through the reference row, then along axis 1.
    """
    psi = field.amplitude
    rho = np.abs(psi) ** 2
    mask = density_mask(rho, rel_floor)
    if reference_point is None:
        ref = tuple(int(i) for i in np.unravel_index(np.argmax(rho), rho.shape))
    else:
        ref = field.grid.nearest_index(reference_point)
    if not mask[ref]:
        raise NodeRegionError(
            f"reference point {field.grid.coordinates(ref)} lies in a node region"
        )

    inc0 = _increments(psi, mask, 0)
    if field.grid.dims == 1:
        phase = _cumulative(inc0, 0)
        phase = phase - phase[ref]
        windings = np.zeros(0, dtype=int)
    else:
        i_ref, j_ref = ref
        row = _cumulative(inc0[:, j_ref], 0)
        base = row - row[i_ref]
        inc1 = _increments(psi, mask, 1)
        cols = _cumulative(inc1, 1)
        phase = base[:, None] + cols - cols[:, j_ref][:, None]
        circ = inc0[:, :-1] + inc1[1:, :] - inc0[:, 1:] - inc1[:-1, :]
        cell_in = mask[:-1, :-1] & mask[1:, :-1] & mask[:-1, 1:] & mask[1:, 1:]
        windings = np.where(cell_in, np.rint(circ / (2 * np.pi)), 0).astype(int)
        if np.any(windings != 0):
            log.warning(
                "phase winds around %d cell(s), net winding %d: J is multivalued",
                int(np.count_nonzero(windings)),
                int(windings.sum()),
            )
    values = field.hbar * np.where(mask, phase, 0.0)
    return ActionField(
        values=values,
        reference=ref,
        reference_phase=float(np.angle(psi[ref])),
        windings=windings,
        hbar=field.hbar,
    )


# #### Full decomposition ####


@dataclass(frozen=True, eq=False)
class BohmFields:
    source: WaveField
    rho: RealArray
    mask: BoolArray
    rho_floor: float
    grad_J: RealArray
    v: RealArray
    S_Q: RealArray
    grad_S_Q: RealArray
    lap_S_Q: RealArray
    Q: RealArray
    div_v: RealArray
    J: Optional[ActionField]
    backend: DerivativeBackend

    @property
    def grid(self) -> Grid:
        return self.source.grid

    @property
    def hbar(self) -> float:
        return self.source.hbar

    @property
    def mass(self) -> float:
        return self.source.mass

    @property
    def time(self) -> float:
        return self.source.time


def decompose(
    field: WaveField,
    *,
    backend: Backend = DerivativeBackend.SPECTRAL,
    rel_floor: float = DEFAULT_RHO_FLOOR,
    reference_point: Optional[Sequence[float]] = None,
    with_action: bool = True,
) -> BohmFields:
    backend = DerivativeBackend(backend)
    kin = _kinematics(field, backend, rel_floor)
    total = float(field.grid.integrate(kin.rho))
    if abs(total - 1) > 1e-8:
        log.debug("decomposing a field of probability %.12g", total)
    grad_J = _grad_J(kin, field.hbar)
    action = action_field(field, reference_point, rel_floor) if with_action else None
    return BohmFields(
        source=field,
        rho=kin.rho,
        mask=kin.mask,
        rho_floor=rel_floor * float(kin.rho.max()),
        grad_J=grad_J,
        v=grad_J / field.mass,
        S_Q=quantum_entropy(field, rel_floor),
        grad_S_Q=_grad_S_Q(kin),
        lap_S_Q=np.where(kin.mask, _lap_S_Q(kin), 0.0),
        Q=_curvature_Q(kin, field.hbar, field.mass),
        div_v=_div_v(kin, field.hbar, field.mass),
        J=action,
        backend=backend,
    )


# #### Reconstruction ####


@dataclass(frozen=True, eq=False)
class Reconstruction:
    field: WaveField
    fidelity: float
    max_error: float
    density_defect: float
    multivalued: bool


def reconstruct(bohm: BohmFields) -> Reconstruction:
    """Rebuild exp(-S_Q + iJ/hbar) and compare it with the source field."""
    if bohm.J is None:
        raise MissingActionError("the decomposition carries no action field")
    if bohm.J.multivalued:
        log.warning(
            "reconstructing from a multivalued action (closure defect %.6g)",
            bohm.J.closure_defect,
        )
    phase = bohm.J.values / bohm.hbar + bohm.J.reference_phase
    amplitude = np.where(bohm.mask, np.exp(-bohm.S_Q + 1j * phase), 0.0)
    rebuilt = bohm.source.evolved(amplitude, bohm.time)
    defect = np.abs(np.exp(-2 * bohm.S_Q) - bohm.rho)
    return Reconstruction(
        field=rebuilt,
        fidelity=fidelity(bohm.source, rebuilt),
        max_error=float(np.max(np.abs(amplitude - bohm.source.amplitude))),
        density_defect=float(np.max(np.where(bohm.mask, defect, 0.0))),
        multivalued=bohm.J.multivalued,
    )


# #### Residuals ####


@dataclass(frozen=True, eq=False)
class Residual:
    name: str
    values: np.ndarray
    mask: BoolArray
    summary: float
    time: float
    index: int


def masked_l2(values: np.ndarray, mask: BoolArray, grid: Grid) -> float:
    return math.sqrt(float(grid.integrate(np.where(mask, np.abs(values) ** 2, 0.0))))


@dataclass(frozen=True, eq=False)
class CenteredDifference:
    prev: WaveField
    cur: WaveField
    next: WaveField
    span: float

    def d_phase_dt(self) -> RealArray:
        # centered difference of the wrapped phase; no branch cut issues
        delta = np.angle(self.next.amplitude * np.conj(self.prev.amplitude))
        return delta / self.span  # type: ignore[no-any-return]

    def d_rho_dt(self) -> RealArray:
        return (  # type: ignore[no-any-return]
            np.abs(self.next.amplitude) ** 2 - np.abs(self.prev.amplitude) ** 2
        ) / self.span


def centered_difference(
    snapshots: Sequence[WaveField], index: int
) -> CenteredDifference:
    if not 0 < index < len(snapshots) - 1:
        raise SeriesEdgeError(
            f"index {index} has no neighbours in a series of {len(snapshots)}"
        )
    prev, cur, nxt = snapshots[index - 1], snapshots[index], snapshots[index + 1]
    check_same_grid(prev, cur, nxt)
    span = nxt.time - prev.time
    if span == 0:
        raise ValueError("neighbouring snapshots share a time stamp")
    return CenteredDifference(prev, cur, nxt, span)


def _series_mask(
    c: CenteredDifference, kin: _Kinematics, rel_floor: float
) -> BoolArray:
    return (
        kin.mask
        & density_mask(np.abs(c.prev.amplitude) ** 2, rel_floor)
        & density_mask(np.abs(c.next.amplitude) ** 2, rel_floor)
    )


def _residual(
    name: str, values: np.ndarray, mask: BoolArray, c: CenteredDifference, index: int
) -> Residual:
    values = np.where(mask, values, 0.0)
    summary = masked_l2(values, mask, c.cur.grid)
    log.debug("%s residual at t=%.6g: %.6g", name, c.cur.time, summary)
    return Residual(name, values, mask, summary, c.cur.time, index)


def hj_residual(
    snapshots: Sequence[WaveField],
    potential: Potential,
    index: int,
    backend: Backend = DerivativeBackend.SPECTRAL,
    rel_floor: float = DEFAULT_RHO_FLOOR,
) -> Residual:
    """dJ/dt + (grad J)^2 / 2m + U + Q on the masked region."""
    c = centered_difference(snapshots, index)
    if potential.grid != c.cur.grid:
        raise ValueError("potential is sampled on a different grid")
    hbar, mass = c.cur.hbar, c.cur.mass
    kin = _kinematics(c.cur, backend, rel_floor)
    grad_J = _grad_J(kin, hbar)
    values = (
        hbar * c.d_phase_dt()
        + np.sum(grad_J**2, axis=0) / (2 * mass)
        + potential.values
        + _curvature_Q(kin, hbar, mass)
    )
    mask = _series_mask(c, kin, rel_floor)
    return _residual("hamilton-jacobi", values, mask, c, index)


def continuity_residual(
    snapshots: Sequence[WaveField],
    index: int,
    backend: Backend = DerivativeBackend.SPECTRAL,
    rel_floor: float = DEFAULT_RHO_FLOOR,
) -> Residual:
    """d rho/dt + div(rho grad J / m).

    The current divergence is hbar Im(Psi* lap Psi) / m.
    """
    c = centered_difference(snapshots, index)
    kin = _kinematics(c.cur, backend, rel_floor)
    values = c.d_rho_dt() + c.cur.hbar / c.cur.mass * kin.psi_lap.imag
    return _residual("continuity", values, _series_mask(c, kin, rel_floor), c, index)


def entropy_balance_residual(
    snapshots: Sequence[WaveField],
    index: int,
    backend: Backend = DerivativeBackend.SPECTRAL,
    rel_floor: float = DEFAULT_RHO_FLOOR,
) -> Residual:
    """dS_Q/dt + v.grad S_Q - div(v) / 2.

    dS_Q/dt is the chain rule applied to the centered density difference.
    """
    c = centered_difference(snapshots, index)
    hbar, mass = c.cur.hbar, c.cur.mass
    kin = _kinematics(c.cur, backend, rel_floor)
    v = _grad_J(kin, hbar) / mass
    d_sq_dt = -_safe_divide(c.d_rho_dt(), 2 * kin.rho, kin.mask)
    values = (
        d_sq_dt
        + np.sum(v * _grad_S_Q(kin), axis=0)
        - 0.5 * _div_v(kin, hbar, mass)
    )
    mask = _series_mask(c, kin, rel_floor)
    return _residual("entropy-balance", values, mask, c, index)


# #### Energy bookkeeping ####


@dataclass(frozen=True)
class EnergyBudget:
    flow_kinetic: float
    potential: float
    quantum: float
    hamiltonian: float

    @property
    def total(self) -> float:
        return self.flow_kinetic + self.potential + self.quantum

    @property
    def defect(self) -> float:
        return abs(self.total - self.hamiltonian)


def energy_budget(
    field: WaveField,
    potential: Potential,
    backend: Backend = DerivativeBackend.SPECTRAL,
    rel_floor: float = DEFAULT_RHO_FLOOR,
) -> EnergyBudget:
    """Split <H> into the flow kinetic, potential and quantum-potential parts."""
    kin = _kinematics(field, backend, rel_floor)
    grid = field.grid
    prob = float(grid.integrate(kin.rho))
    grad_J = _grad_J(kin, field.hbar)
    flow = grid.integrate(kin.rho * np.sum(grad_J**2, axis=0)) / (2 * field.mass)
    pot = grid.integrate(kin.rho * potential.values)
    quantum = grid.integrate(
        np.where(kin.mask, kin.rho * _curvature_Q(kin, field.hbar, field.mass), 0.0)
    )
    return EnergyBudget(
        flow_kinetic=float(flow) / prob,
        potential=float(pot) / prob,
        quantum=float(quantum) / prob,
        hamiltonian=energy_expectation(field, potential),
    )


# #### Refinement ####


def observed_order(coarse: float, fine: float, ratio: float = 2.0) -> float:
    """Convergence order implied by two errors at resolutions differing by ``ratio``."""
    if coarse <= 0 or fine <= 0:
        return math.nan
    return math.log(coarse / fine) / math.log(ratio)


@dataclass(frozen=True)
class RefinementRow:
    points: int
    dt: float
    hamilton_jacobi: float
    continuity: float
    entropy_balance: float


def refinement_study(
    levels: int = 2,
    *,
    extent: float = 20.0,
    points: int = 256,
    dt: float = 0.05,
    t_eval: float = 1.0,
    sigma: float = 1.0,
    backend: Backend = DerivativeBackend.SPECTRAL,
) -> List[RefinementRow]:
    """Residual summaries of a free Gaussian under simultaneous dx, dt halving."""
    rows = []
    for level in range(levels):
        n = points * 2**level
        step_dt = dt / 2**level
        grid = make_grid(1, [(-extent, extent)], n, endpoint=False)
        field = gaussian_packet(grid, 0.0, sigma)
        potential = build_potential(grid, FreePotential())
        index = int(round(t_eval / step_dt))
        series = evolve(field, potential, EvolutionPlan(step_dt, index + 1)).snapshots
        rows.append(
            RefinementRow(
                points=n,
                dt=step_dt,
                hamilton_jacobi=hj_residual(series, potential, index, backend).summary,
                continuity=continuity_residual(series, index, backend).summary,
                entropy_balance=entropy_balance_residual(
                    series, index, backend
                ).summary,
            )
        )
        log.info("refinement level %d: %s", level, rows[-1])
    return rows
