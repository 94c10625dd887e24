import logging
import math
import numpy as np
import pytest

from bohm_lab.fields import (
    FieldMismatchError,
    WaveField,
    fidelity,
    free_gaussian,
    gaussian_packet,
    gaussian_pair,
    harmonic_eigenstate,
    harmonic_energy,
    inner_product,
    norm,
    plane_wave,
    superpose,
    vortex_state,
)
from bohm_lab.grid import Grid, make_grid


def _variance(field: WaveField) -> float:
    rho = np.abs(field.amplitude) ** 2
    x = field.grid.axes[0]
    total = float(field.grid.integrate(rho))
    mean = float(field.grid.integrate(rho * x)) / total
    return float(field.grid.integrate(rho * (x - mean) ** 2)) / total


def test_gaussian_packet_is_normalized(line: Grid) -> None:
    field = gaussian_packet(line, 0.0, 1.0, 2.0)
    assert norm(field) == pytest.approx(1.0, abs=1e-12)
    assert field.time == 0.0


def test_free_gaussian_spreads() -> None:
    grid = make_grid(1, [(-40.0, 40.0)], 1024, endpoint=False)
    field = free_gaussian(grid, 0.0, 1.0, 0.0, time=2.0)
    # sigma(t)^2 = sigma^2 (1 + (hbar t / 2 m sigma^2)^2) = 2
    assert _variance(field) == pytest.approx(2.0, rel=1e-8)
    assert field.time == 2.0


def test_free_gaussian_drifts_with_group_velocity() -> None:
    grid = make_grid(1, [(-40.0, 40.0)], 1024, endpoint=False)
    field = free_gaussian(grid, -5.0, 1.0, 1.5, time=2.0, mass=0.5)
    rho = np.abs(field.amplitude) ** 2
    mean = float(grid.integrate(rho * grid.axes[0]) / grid.integrate(rho))
    assert mean == pytest.approx(-5.0 + 1.5 * 2.0 / 0.5, abs=1e-9)


def test_invalid_sigma(line: Grid) -> None:
    with pytest.raises(ValueError, match="sigma must be positive"):
        free_gaussian(line, 0.0, 0.0)


def test_packet_near_boundary_warns(
    line: Grid, caplog: pytest.LogCaptureFixture
) -> None:
    with caplog.at_level(logging.WARNING):
        gaussian_packet(line, 18.0, 1.0)
    assert "from the boundary" in caplog.text
    assert "does not decay at the grid boundary" in caplog.text


def test_commensurate_plane_wave_is_quiet(
    line: Grid, caplog: pytest.LogCaptureFixture
) -> None:
    with caplog.at_level(logging.WARNING):
        field = plane_wave(line, 3 * 2 * math.pi / 40)
    assert caplog.text == ""
    assert norm(field) == pytest.approx(1.0)
    assert np.allclose(np.abs(field.amplitude) ** 2, 1 / 40)


def test_incommensurate_plane_wave_warns(
    line: Grid, caplog: pytest.LogCaptureFixture
) -> None:
    with caplog.at_level(logging.WARNING):
        plane_wave(line, 1.0)
    assert "not commensurate" in caplog.text


def test_oscillator_levels_are_orthonormal() -> None:
    grid = make_grid(1, [(-10.0, 10.0)], 256, endpoint=False)
    ground = harmonic_eigenstate(grid, 0)
    first = harmonic_eigenstate(grid, 1)
    second = harmonic_eigenstate(grid, 2)
    assert norm(ground) == pytest.approx(1.0)
    assert abs(inner_product(ground, first)) < 1e-12
    assert abs(inner_product(ground, second)) < 1e-10
    assert abs(inner_product(first, second)) < 1e-12


def test_oscillator_ground_width() -> None:
    grid = make_grid(1, [(-10.0, 10.0)], 256, endpoint=False)
    field = harmonic_eigenstate(grid, 0, omega=2.0)
    # <x^2> = hbar / (2 m omega)
    assert _variance(field) == pytest.approx(0.25, rel=1e-10)


@pytest.mark.parametrize(
    "level,omega,dims,energy",
    [
        (0, 1.0, 1, 0.5),
        (1, 2.0, 1, 3.0),
        ((1, 0), 1.0, 2, 2.0),
        ((2, 3), 0.5, 2, 3.0),
    ],
)
def test_harmonic_energy(level: object, omega: float, dims: int, energy: float) -> None:
    assert harmonic_energy(level, omega, dims) == pytest.approx(energy)  # type: ignore


def test_vortex_needs_plane(line: Grid) -> None:
    with pytest.raises(ValueError, match="2D grid"):
        vortex_state(line)


def test_vortex_has_node_at_center(plane: Grid) -> None:
    field = vortex_state(plane, 1)
    i, j = plane.nearest_index([0.0, 0.0])
    assert abs(field.amplitude[i, j]) == 0.0
    assert norm(field) == pytest.approx(1.0)


def test_vortex_winding_sign(plane: Grid) -> None:
    plus = vortex_state(plane, 1)
    minus = vortex_state(plane, -1)
    assert np.allclose(minus.amplitude, np.conj(plus.amplitude))


def test_fidelity_ignores_global_phase(line: Grid) -> None:
    field = gaussian_packet(line, 0.0, 1.0, 1.0)
    assert fidelity(field, field.scaled(np.exp(0.7j))) == pytest.approx(1.0)


def test_superpose_requires_same_time(line: Grid) -> None:
    a = free_gaussian(line, -2.0, 1.0)
    b = free_gaussian(line, 2.0, 1.0, time=1.0)
    with pytest.raises(FieldMismatchError, match="time stamps differ"):
        superpose([a, b])


def test_superpose_requires_same_grid(line: Grid) -> None:
    other = make_grid(1, [(-10.0, 10.0)], 256, endpoint=False)
    with pytest.raises(FieldMismatchError, match="different grids"):
        superpose([free_gaussian(line, 0.0, 1.0), free_gaussian(other, 0.0, 1.0)])


def test_superpose_cancelling_fields(line: Grid) -> None:
    a = gaussian_packet(line, 0.0, 1.0)
    with pytest.raises(ValueError, match="identically zero"):
        superpose([a, a], [1.0, -1.0])


def test_gaussian_pair_is_normalized_and_symmetric(line: Grid) -> None:
    field = gaussian_pair(line, [-3.0, 3.0], 1.0)
    assert norm(field) == pytest.approx(1.0)
    rho = np.abs(field.amplitude) ** 2
    # the grid is symmetric about 0 up to the dropped upper end
    assert np.allclose(rho[1:], rho[1:][::-1], atol=1e-14)


def test_gaussian_pair_needs_two_centers(line: Grid) -> None:
    with pytest.raises(ValueError, match="exactly two centers"):
        gaussian_pair(line, [0.0], 1.0)


def test_wave_field_shape_mismatch(line: Grid) -> None:
    with pytest.raises(FieldMismatchError, match="does not match grid"):
        WaveField(line, np.ones(10))


def test_wave_field_is_read_only(line: Grid) -> None:
    source = np.ones(line.shape, dtype=complex)
    field = WaveField(line, source)
    source[0] = 5.0
    assert field.amplitude[0] == 1.0
    with pytest.raises(ValueError):
        field.amplitude[0] = 2.0


def test_wave_field_rejects_non_finite(line: Grid) -> None:
    amplitude = np.ones(line.shape, dtype=complex)
    amplitude[3] = np.nan
    with pytest.raises(ValueError, match="finite"):
        WaveField(line, amplitude)
