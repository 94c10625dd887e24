import math
import numpy as np
import pytest
import scipy.fft

from bohm_lab.evolve import EvolutionPlan, evolve, kinetic_symbol
from bohm_lab.fields import WaveField, gaussian_packet, norm
from bohm_lab.grid import Grid
from bohm_lab.potentials import (
    ConstantPotential,
    FreePotential,
    HarmonicPotential,
    PotentialSpec,
    TwoSlitBarrier,
    build_potential,
)
from bohm_lab.propagator import (
    LatticeSpec,
    NoOracleError,
    QuadratureError,
    convergence_study,
    exact_kernel,
    free_kernel,
    lattice_grid,
    lattice_propagator,
    mehler_kernel,
    propagate_state,
    sampler,
    semigroup_check,
    short_time_kernel,
    theta_robustness,
)
from bohm_lab.types import PotentialRule


@pytest.mark.parametrize(
    "kwargs,match",
    [
        ({"slices": 0, "total_time": 1.0}, "slice count"),
        ({"slices": 4, "total_time": 0.0}, "total time"),
        ({"slices": 4, "total_time": 1.0, "theta": 0.5}, "theta must lie"),
        ({"slices": 4, "total_time": 1.0, "spacing": 0.1}, "go together"),
    ],
)
def test_lattice_validation(kwargs: dict, match: str) -> None:
    with pytest.raises(ValueError, match=match):
        LatticeSpec(**kwargs)


def test_rotated_slice() -> None:
    lattice = LatticeSpec(4, 2.0, theta=0.1)
    assert lattice.delta_t == 0.5
    assert lattice.tau == pytest.approx(0.5 * complex(math.cos(0.1), -math.sin(0.1)))
    assert lattice.rotated_time == pytest.approx(4 * lattice.tau)


def test_short_time_kernel_of_free_particle() -> None:
    fn = sampler(FreePotential())
    value = short_time_kernel(np.array(1.0), np.array(0.2), fn, 0.3, theta=0.05)
    tau = 0.3 * complex(math.cos(0.05), -math.sin(0.05))
    assert complex(value) == pytest.approx(free_kernel(1.0, 0.2, tau))
    with pytest.raises(ValueError, match="delta_t must be positive"):
        short_time_kernel(np.array(1.0), np.array(0.0), fn, 0.0)


def test_symmetric_rule_averages_endpoints() -> None:
    fn = sampler(HarmonicPotential(omega=1.0))
    endpoint = short_time_kernel(np.array(2.0), np.array(0.0), fn, 0.1)
    symmetric = short_time_kernel(
        np.array(2.0), np.array(0.0), fn, 0.1, rule=PotentialRule.SYMMETRIC
    )
    # U(0) = 0 and U(2) = 2, so the rules differ by exp(-i 0.1)
    assert complex(symmetric) == pytest.approx(complex(endpoint) * np.exp(-0.1j))


def test_mehler_reduces_to_free_kernel() -> None:
    assert mehler_kernel(1.0, 0.5, 0.7, 1e-6) == pytest.approx(
        free_kernel(1.0, 0.5, 0.7), rel=1e-9
    )


def test_exact_kernels() -> None:
    const = exact_kernel(ConstantPotential(2.0), 1.0, 0.0, 0.5)
    assert const == pytest.approx(free_kernel(1.0, 0.0, 0.5) * np.exp(-1j))
    shifted = exact_kernel(HarmonicPotential(1.0, center=(1.0,)), 2.0, 1.5, 0.4)
    assert shifted == pytest.approx(mehler_kernel(1.0, 0.5, 0.4, 1.0))
    barrier = TwoSlitBarrier(0.0, 1.0, 1.0, (-1.0, 1.0), 0.5)
    with pytest.raises(NoOracleError, match="two_slit"):
        exact_kernel(barrier, 0.0, 0.0, 1.0)


def test_lattice_grid_puts_end_on_node() -> None:
    lattice = LatticeSpec(8, 1.0, theta=0.05)
    grid, index = lattice_grid(lattice, 0.0, 0.7)
    assert grid.axes[0][index] == pytest.approx(0.7, abs=1e-12)
    assert grid.points[0] == 2 * index + 1
    explicit = LatticeSpec(8, 1.0, half_width=2.0, spacing=0.5)
    grid, index = lattice_grid(explicit, 0.0, 0.0)
    expected = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0]
    assert list(grid.axes[0]) == pytest.approx(expected)
    assert index == 4


def test_lattice_grid_errors() -> None:
    with pytest.raises(QuadratureError, match="explicit quadrature grid"):
        lattice_grid(LatticeSpec(8, 1.0), 0.0, 1.0)
    with pytest.raises(QuadratureError, match="exceeds"):
        lattice_grid(LatticeSpec(8, 1.0, theta=0.05), 0.0, 1.0, max_points=100)


def test_single_slice_is_short_time_kernel() -> None:
    lattice = LatticeSpec(1, 0.5, theta=0.02)
    value = lattice_propagator(lattice, FreePotential(), 0.0, 1.0)
    assert value == pytest.approx(free_kernel(1.0, 0.0, lattice.rotated_time))


def test_free_lattice_is_exact() -> None:
    rows = convergence_study(FreePotential(), 0.0, 1.0, 1.0, [2, 4, 8], theta=0.05)
    assert [row.slices for row in rows] == [2, 4, 8]
    assert max(row.error for row in rows) < 1e-6
    assert rows[0].order is None


def test_harmonic_endpoint_rule_is_first_order() -> None:
    rows = convergence_study(
        HarmonicPotential(omega=1.0), 0.0, 1.0, math.pi / 2, [16, 32, 64]
    )
    errors = [row.error for row in rows]
    assert errors[0] > errors[1] > errors[2]
    assert errors[-1] < 0.01
    assert rows[-1].order == pytest.approx(1.0, abs=0.3)


def test_harmonic_symmetric_rule_is_second_order() -> None:
    rows = convergence_study(
        HarmonicPotential(omega=1.0),
        0.0,
        1.0,
        math.pi / 2,
        [16, 32, 64],
        rule=PotentialRule.SYMMETRIC,
    )
    assert rows[-1].order is not None
    assert rows[-1].order > 1.5


def test_slice_counts_must_increase() -> None:
    with pytest.raises(ValueError, match="increasing"):
        convergence_study(FreePotential(), 0.0, 1.0, 1.0, [8, 4])


@pytest.mark.parametrize("t_mid", [0.25, 0.5, 0.75])
def test_free_semigroup(t_mid: float) -> None:
    lattice = LatticeSpec(4, 1.0, theta=0.05)
    report = semigroup_check(lattice, FreePotential(), 0.0, 1.0, t_mid)
    assert report.split == round(4 * t_mid)
    assert report.defect < 1e-6


@pytest.mark.parametrize("rule", list(PotentialRule))
def test_harmonic_semigroup(rule: PotentialRule) -> None:
    lattice = LatticeSpec(16, math.pi / 2, theta=0.02, rule=rule)
    report = semigroup_check(lattice, HarmonicPotential(1.0), 0.0, 1.0, math.pi / 4)
    assert report.split == 8
    assert report.defect < 1e-3


def test_semigroup_split_point_does_not_matter() -> None:
    lattice = LatticeSpec(16, math.pi / 2, theta=0.02)
    potential = HarmonicPotential(1.0)
    half = semigroup_check(lattice, potential, 0.0, 1.0, math.pi / 4)
    quarter = semigroup_check(lattice, potential, 0.0, 1.0, math.pi / 8)
    assert quarter.split == 4
    assert abs(half.composed - quarter.composed) / abs(half.direct) < 1e-3


@pytest.mark.parametrize(
    "t_mid,match",
    [(0.0, "must lie in"), (2.0, "must lie in"), (0.3, "slice boundary")],
)
def test_semigroup_split_errors(t_mid: float, match: str) -> None:
    lattice = LatticeSpec(16, math.pi / 2, theta=0.02)
    with pytest.raises(ValueError, match=match):
        semigroup_check(lattice, HarmonicPotential(1.0), 0.0, 1.0, t_mid)


def test_propagate_state_matches_spectral_flow(line: Grid) -> None:
    field = gaussian_packet(line, 0.0, 1.0, 0.5)
    potential = build_potential(line, FreePotential())
    lattice = LatticeSpec(1, 0.5, theta=0.2)
    moved = propagate_state(field, potential, lattice)
    symbol = kinetic_symbol(line, 1.0, 1.0)
    expected = scipy.fft.ifft(
        np.exp(-1j * symbol * lattice.tau) * scipy.fft.fft(field.amplitude)
    )
    assert moved.time == pytest.approx(0.5)
    assert np.max(np.abs(moved.amplitude - expected)) < 1e-4


def test_propagate_state_checks(line: Grid, plane: Grid) -> None:
    field = gaussian_packet(line, 0.0, 1.0)
    potential = build_potential(line, FreePotential())
    with pytest.raises(ValueError, match="different hbar or mass"):
        propagate_state(field, potential, LatticeSpec(1, 0.5, theta=0.2, mass=2.0))
    flat = gaussian_packet(plane, (0.0, 0.0), 1.0)
    potential = build_potential(plane, FreePotential())
    with pytest.raises(ValueError, match="one-dimensional"):
        propagate_state(flat, potential, LatticeSpec(1, 0.5))


@pytest.mark.parametrize(
    "spec,slices",
    [(FreePotential(), 16), (HarmonicPotential(omega=1.0), 64)],
)
def test_propagate_state_keeps_norm_at_zero_theta(
    line: Grid, spec: PotentialSpec, slices: int
) -> None:
    field = gaussian_packet(line, 0.0, 1.0, 0.5)
    before = field.amplitude.copy()
    potential = build_potential(line, spec)
    moved = propagate_state(field, potential, LatticeSpec(slices, 0.5))
    assert norm(moved) == pytest.approx(1.0, abs=1e-6)
    assert np.array_equal(field.amplitude, before)


def _l2_distance(a: WaveField, b: WaveField) -> float:
    return math.sqrt(float(a.grid.integrate(np.abs(a.amplitude - b.amplitude) ** 2)))


@pytest.mark.parametrize(
    "spec,rule,slices",
    [
        (FreePotential(), PotentialRule.ENDPOINT, 4),
        (HarmonicPotential(omega=1.0), PotentialRule.ENDPOINT, 1000),
        (HarmonicPotential(omega=1.0), PotentialRule.SYMMETRIC, 64),
    ],
)
def test_propagate_state_matches_evolve(
    line: Grid, spec: PotentialSpec, rule: PotentialRule, slices: int
) -> None:
    field = gaussian_packet(line, 0.0, 1.0, 0.5)
    potential = build_potential(line, spec)
    moved = propagate_state(field, potential, LatticeSpec(slices, 0.5, rule=rule))
    evolved = evolve(field, potential, EvolutionPlan(dt=0.0025, steps=200))[-1]
    assert moved.time == pytest.approx(evolved.time)
    assert _l2_distance(moved, evolved) < 1e-3


@pytest.mark.parametrize(
    "spec,total_time,slices",
    [
        (FreePotential(), 1.0, 16),
        (HarmonicPotential(omega=1.0), math.pi / 2, 32),
    ],
)
def test_theta_robustness(spec: PotentialSpec, total_time: float, slices: int) -> None:
    report = theta_robustness(spec, 0.0, 1.0, total_time, slices)
    assert [theta for theta, _ in report.errors] == [0.01, 0.04]
    assert report.slices == slices
    assert report.spread < 0.005
