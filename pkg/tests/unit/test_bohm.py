import logging
import math
import numpy as np
import pytest

from bohm_lab.bohm import (
    MissingActionError,
    NodeRegionError,
    SeriesEdgeError,
    action_field,
    decompose,
    density_mask,
    energy_budget,
    hj_residual,
    observed_order,
    phase_gradient,
    quantum_entropy,
    quantum_potential,
    reconstruct,
    refinement_study,
)
from bohm_lab.evolve import EvolutionPlan, evolve
from bohm_lab.fields import gaussian_packet, harmonic_eigenstate, vortex_state
from bohm_lab.grid import Grid, make_grid
from bohm_lab.potentials import FreePotential, HarmonicPotential, build_potential
from bohm_lab.types import QuantumPotentialForm


def _core(field_rho: np.ndarray, fraction: float = 1e-6) -> np.ndarray:
    return field_rho >= fraction * field_rho.max()


def test_density_mask_is_relative() -> None:
    rho = np.array([1.0, 1e-3, 1e-13, 0.0]) * 4
    assert list(density_mask(rho)) == [True, True, False, False]
    assert list(density_mask(rho, 1e-2)) == [True, False, False, False]


def test_phase_gradient_of_moving_packet(line: Grid) -> None:
    field = gaussian_packet(line, 0.0, 1.0, 1.5, hbar=2.0)
    grad = phase_gradient(field)
    core = _core(np.abs(field.amplitude) ** 2)
    assert grad.shape == (1, 256)
    assert np.allclose(grad[0][core], 2.0 * 1.5, atol=1e-8)


def test_gaussian_quantum_potential(line: Grid) -> None:
    field = gaussian_packet(line, 0.0, 1.0)
    x = line.axes[0]
    q = quantum_potential(field)
    core = np.abs(x) < 5
    assert np.allclose(q[core], 0.25 - x[core] ** 2 / 8, atol=1e-9)


def test_curvature_and_entropy_forms_agree(plane: Grid) -> None:
    field = gaussian_packet(plane, (0.5, -0.5), 1.2, (1.0, 0.5))
    core = _core(np.abs(field.amplitude) ** 2)
    curvature = quantum_potential(field, QuantumPotentialForm.CURVATURE)
    entropy = quantum_potential(field, "entropy")
    assert np.max(np.abs(curvature - entropy)[core]) < 1e-8


def test_unknown_form(line: Grid) -> None:
    with pytest.raises(ValueError, match="unknown quantum potential form 'bogus'"):
        quantum_potential(gaussian_packet(line, 0.0, 1.0), "bogus")


def test_ground_state_total_potential_is_flat() -> None:
    grid = make_grid(1, [(-10.0, 10.0)], 128, endpoint=False)
    ground = harmonic_eigenstate(grid, 0, omega=1.0)
    potential = build_potential(grid, HarmonicPotential(omega=1.0))
    bohm = decompose(ground)
    core = _core(bohm.rho)
    total = (potential.values + bohm.Q)[core]
    assert np.allclose(total, 0.5, atol=1e-8)
    assert np.allclose(bohm.v[0][core], 0.0, atol=1e-10)


def test_quantum_entropy_is_log_density(line: Grid) -> None:
    field = gaussian_packet(line, 0.0, 1.0)
    s_q = quantum_entropy(field)
    rho = np.abs(field.amplitude) ** 2
    core = _core(rho)
    assert np.allclose(s_q[core], -0.5 * np.log(rho[core]))
    # floored far from the packet
    assert s_q.max() == pytest.approx(-0.5 * math.log(1e-12 * rho.max()))


def test_action_of_plane_wave_packet(line: Grid) -> None:
    field = gaussian_packet(line, 0.0, 1.0, 1.0)
    action = action_field(field)
    x = line.axes[0]
    assert action.reference == (128,)
    assert not action.multivalued
    mask = density_mask(np.abs(field.amplitude) ** 2)
    assert np.allclose(action.values[mask], x[mask], atol=1e-10)


def test_reference_in_node_region(line: Grid) -> None:
    field = gaussian_packet(line, 0.0, 1.0)
    with pytest.raises(NodeRegionError, match="node region"):
        action_field(field, reference_point=(19.0,))


def test_vortex_makes_action_multivalued(
    plane: Grid, caplog: pytest.LogCaptureFixture
) -> None:
    field = vortex_state(plane, winding=1, center=(0.125, 0.125))
    with caplog.at_level(logging.WARNING):
        action = action_field(field)
    assert action.multivalued
    assert action.net_winding == 1
    assert action.vortex_cells == [(32, 32)]
    assert action.closure_defect == pytest.approx(2 * math.pi)
    assert "J is multivalued" in caplog.text


def test_antivortex_winds_backwards(plane: Grid) -> None:
    field = vortex_state(plane, winding=-1, center=(0.125, 0.125))
    assert action_field(field).net_winding == -1


def test_reconstruct_recovers_source(plane: Grid) -> None:
    field = gaussian_packet(plane, (1.0, 0.0), 1.0, (0.5, -1.0))
    result = reconstruct(decompose(field))
    assert result.fidelity == pytest.approx(1.0, abs=1e-10)
    assert result.max_error < 1e-6
    assert result.density_defect < 1e-12
    assert not result.multivalued


def test_reconstruct_needs_action(line: Grid) -> None:
    bohm = decompose(gaussian_packet(line, 0.0, 1.0), with_action=False)
    assert bohm.J is None
    with pytest.raises(MissingActionError):
        reconstruct(bohm)


def test_decompose_fd2_backend(line: Grid) -> None:
    field = gaussian_packet(line, 0.0, 1.0, 1.0)
    spectral = decompose(field)
    fd2 = decompose(field, backend="fd2")
    core = _core(spectral.rho, 1e-2)
    assert np.allclose(spectral.Q[core], fd2.Q[core], atol=0.05)
    assert fd2.backend.value == "fd2"


def test_residual_needs_neighbours(line: Grid) -> None:
    field = gaussian_packet(line, 0.0, 1.0)
    potential = build_potential(line, FreePotential())
    series = evolve(field, potential, EvolutionPlan(0.01, 2)).snapshots
    with pytest.raises(SeriesEdgeError, match="no neighbours"):
        hj_residual(series, potential, 0)
    with pytest.raises(SeriesEdgeError):
        hj_residual(series, potential, 2)
    assert hj_residual(series, potential, 1).name == "hamilton-jacobi"


def test_residuals_converge_at_second_order() -> None:
    coarse, fine = refinement_study(levels=2)
    assert observed_order(coarse.hamilton_jacobi, fine.hamilton_jacobi) > 1.5
    assert observed_order(coarse.continuity, fine.continuity) > 1.5
    assert fine.entropy_balance < coarse.entropy_balance


def test_energy_budget_of_ground_state() -> None:
    grid = make_grid(1, [(-10.0, 10.0)], 128, endpoint=False)
    ground = harmonic_eigenstate(grid, 0, omega=1.0)
    potential = build_potential(grid, HarmonicPotential(omega=1.0))
    budget = energy_budget(ground, potential)
    assert budget.flow_kinetic == pytest.approx(0.0, abs=1e-12)
    assert budget.potential == pytest.approx(0.25, abs=1e-9)
    assert budget.quantum == pytest.approx(0.25, abs=1e-6)
    assert budget.hamiltonian == pytest.approx(0.5, abs=1e-9)
    assert budget.defect < 1e-6


def test_observed_order() -> None:
    assert observed_order(4.0, 1.0) == pytest.approx(2.0)
    assert observed_order(9.0, 1.0, ratio=3.0) == pytest.approx(2.0)
    assert math.isnan(observed_order(0.0, 1.0))


def test_global_phase_changes_nothing(line: Grid) -> None:
    field = gaussian_packet(line, 0.0, 1.0, 1.0)
    plain = decompose(field)
    turned = decompose(field.scaled(np.exp(0.7j)))
    core = _core(plain.rho)
    assert np.allclose(turned.rho, plain.rho)
    assert np.allclose(turned.grad_J[:, core], plain.grad_J[:, core], atol=1e-10)
    assert np.allclose(turned.v[:, core], plain.v[:, core], atol=1e-10)
    assert np.allclose(turned.S_Q[core], plain.S_Q[core], atol=1e-10)
    assert np.allclose(turned.Q[core], plain.Q[core], atol=1e-7)


def test_quantum_potential_scales_with_inverse_mass(line: Grid) -> None:
    light = decompose(gaussian_packet(line, 0.0, 1.0, 1.0))
    heavy = decompose(gaussian_packet(line, 0.0, 1.0, 1.0, mass=2.0))
    core = _core(light.rho)
    assert np.allclose(2 * heavy.Q[core], light.Q[core])
    assert np.allclose(2 * heavy.v[:, core], light.v[:, core])
    assert np.allclose(heavy.S_Q[core], light.S_Q[core])
