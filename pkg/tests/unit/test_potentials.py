import numpy as np
import pytest

from bohm_lab.grid import Grid, make_grid
from bohm_lab.potentials import (
    ConstantPotential,
    FreePotential,
    HarmonicPotential,
    PotentialError,
    PotentialKind,
    SampledPotential,
    TwoSlitBarrier,
    build_potential,
)


@pytest.fixture
def barrier() -> TwoSlitBarrier:
    return TwoSlitBarrier(
        x_wall=0.0,
        thickness=1.0,
        height=50.0,
        slit_centers=(-2.0, 2.0),
        slit_width=1.0,
    )


def test_free_potential_is_zero(line: Grid) -> None:
    pot = build_potential(line, FreePotential())
    assert pot.kind == PotentialKind.FREE
    assert pot.is_constant()
    assert np.all(pot.values == 0.0)


def test_constant_potential(plane: Grid) -> None:
    pot = build_potential(plane, ConstantPotential(2.5))
    assert pot.values.shape == plane.shape
    assert pot.is_constant()
    assert np.all(pot.gradient == 0.0)


def test_constant_must_be_finite(line: Grid) -> None:
    with pytest.raises(PotentialError, match="finite"):
        build_potential(line, ConstantPotential(float("inf")))


def test_harmonic_values(line: Grid) -> None:
    pot = build_potential(line, HarmonicPotential(omega=2.0), mass=3.0)
    x = line.axes[0]
    assert np.allclose(pot.values, 0.5 * 3.0 * 4.0 * x**2)
    assert not pot.is_constant()


def test_harmonic_derivatives_are_exact(plane: Grid) -> None:
    pot = build_potential(plane, HarmonicPotential(omega=1.0, center=(1.0, -1.0)))
    x, y = plane.mesh()
    assert np.allclose(pot.gradient[0], x - 1.0)
    assert np.allclose(pot.gradient[1], y + 1.0)
    assert np.allclose(pot.laplacian, 2.0)


@pytest.mark.parametrize(
    "spec,match",
    [
        (HarmonicPotential(omega=0.0), "omega must be positive"),
        (HarmonicPotential(omega=1.0, center=(0.0, 0.0)), "dimensions"),
    ],
)
def test_harmonic_validation(line: Grid, spec: HarmonicPotential, match: str) -> None:
    with pytest.raises(PotentialError, match=match):
        build_potential(line, spec)


def test_potential_values_are_read_only(line: Grid) -> None:
    pot = build_potential(line, HarmonicPotential(omega=1.0))
    with pytest.raises(ValueError):
        pot.values[0] = 1.0


def test_barrier_profile(plane: Grid, barrier: TwoSlitBarrier) -> None:
    pot = build_potential(plane, barrier)
    assert pot.kind == PotentialKind.TWO_SLIT
    assert pot.values[plane.nearest_index((0.0, 0.0))] == pytest.approx(50.0)
    assert pot.values[plane.nearest_index((0.0, 2.0))] == pytest.approx(0.0)
    assert pot.values[plane.nearest_index((-4.0, 0.0))] == pytest.approx(0.0)
    assert barrier.separation == 4.0


def test_sharp_barrier_evaluation(barrier: TwoSlitBarrier) -> None:
    x = np.array([0.0, 0.0, 0.0, 3.0])
    y = np.array([0.0, 2.0, -2.4, 0.0])
    assert list(barrier.evaluate((x, y))) == [50.0, 0.0, 0.0, 0.0]


def test_barrier_needs_plane(line: Grid, barrier: TwoSlitBarrier) -> None:
    with pytest.raises(PotentialError, match="a two-slit barrier needs a 2D grid"):
        build_potential(line, barrier)


@pytest.mark.parametrize(
    "changes,match",
    [
        ({"height": -1.0}, "barrier height"),
        ({"thickness": 0.0}, "wall thickness"),
        ({"slit_width": 0.0}, "slit width"),
        ({"slit_centers": (0.0, 0.5)}, "overlap"),
        ({"x_wall": 7.9}, "wall lies outside the grid"),
        ({"slit_centers": (-2.0, 7.8)}, "slits lie outside the wall"),
    ],
)
def test_barrier_validation(
    plane: Grid, barrier: TwoSlitBarrier, changes: dict, match: str
) -> None:
    spec = TwoSlitBarrier(**{**barrier.__dict__, **changes})
    with pytest.raises(PotentialError, match=match):
        build_potential(plane, spec)


def test_sampled_potential_roundtrip(line: Grid) -> None:
    samples = np.cos(line.axes[0] / 5)
    pot = build_potential(line, SampledPotential(line, samples))
    assert np.array_equal(pot.values, samples)
    inner = np.array([0.0, 1.0])
    assert np.allclose(
        pot.spec.evaluate((inner,)), np.cos(inner / 5), atol=1e-3
    )


def test_sampled_potential_other_grid(line: Grid) -> None:
    other = make_grid(1, [(-10.0, 10.0)], 256, endpoint=False)
    spec = SampledPotential(other, np.zeros(other.shape))
    with pytest.raises(PotentialError, match="different grid"):
        build_potential(line, spec)


def test_sampled_potential_must_be_finite(line: Grid) -> None:
    samples = np.zeros(line.shape)
    samples[3] = np.nan
    with pytest.raises(PotentialError, match="finite and real"):
        build_potential(line, SampledPotential(line, samples))
