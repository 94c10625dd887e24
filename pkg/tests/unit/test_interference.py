import math
import numpy as np
import pytest

from bohm_lab.fields import WaveField
from bohm_lab.grid import Grid, make_grid
from bohm_lab.interference import (
    FringeGeometry,
    NoFringesError,
    SlitModel,
    compare_simulated,
    envelope,
    fit_fringes,
    fringe_maxima,
    fringe_model,
    midline,
    pattern,
    pattern_integral,
    pattern_table,
    screen_profile,
    slit_density,
    superposition_density,
    superposition_limits,
)
from bohm_lab.potentials import TwoSlitBarrier


@pytest.fixture
def model() -> SlitModel:
    return SlitModel(0.5, -0.5, 1.0, 2.0)


@pytest.fixture
def screen() -> Grid:
    return make_grid(2, [(-20.0, 20.0), (-20.0, 20.0)], 256, endpoint=False)


def _fringe_field(grid: Grid, k: float) -> WaveField:
    y = grid.axes[1]
    row = np.sqrt(fringe_model(y, 1.0, 0.0, 15.0, k, 0.9))
    return WaveField(grid, np.broadcast_to(row, grid.shape))


def test_pattern_integral(model: SlitModel) -> None:
    # the cross term integrates to exp(-d^2 / 8 sigma^2 - k^2 sigma^2 / 2)
    expected = 1 + math.exp(-1 / 8 - 2)
    assert pattern_integral(model) == pytest.approx(expected, rel=1e-7)
    assert pattern_integral(model) == pytest.approx(1.1194330, abs=1e-6)


def test_pattern_stays_within_envelope(model: SlitModel) -> None:
    x = np.linspace(-6, 6, 241)
    lower, upper = envelope(model, x)
    p = pattern(model, x)
    assert np.all(lower <= p + 1e-15)
    assert np.all(p <= upper + 1e-15)
    assert np.allclose(midline(model, x), (lower + upper) / 2)


def test_pattern_at_origin(model: SlitModel) -> None:
    rho = slit_density(model, 1, np.array(0.0))
    center = float(pattern(model, np.array(0.0)))
    assert float(rho) == pytest.approx(0.35207, abs=1e-5)
    assert center == pytest.approx(2 * float(rho))
    assert center == pytest.approx(0.70413, abs=2e-5)


@pytest.mark.parametrize(
    "args,match",
    [
        ((0.5, -0.5, 0.0, 2.0), "sigma must be positive"),
        ((0.5, -0.5, 1.0, 0.0), "k must be positive"),
        ((0.5, 0.5, 1.0, 2.0), "distinct"),
    ],
)
def test_slit_model_validation(args: tuple, match: str) -> None:
    with pytest.raises(ValueError, match=match):
        SlitModel(*args)


def test_slit_density_path(model: SlitModel) -> None:
    with pytest.raises(ValueError, match="path must be 1 or 2"):
        slit_density(model, 3, np.zeros(1))


def test_superposition_limits() -> None:
    upper, lower = superposition_limits(0.1, 0.4)
    S1, S2 = np.full(2, 0.1), np.full(2, 0.4)
    values = superposition_density(S1, S2, np.array([0.0, math.pi]), np.zeros(2))
    assert values == pytest.approx([upper, lower])
    scaled = superposition_density(S1, S2, np.array([2 * math.pi]), np.zeros(1), 2.0)
    assert scaled == pytest.approx([lower])


def test_pattern_table(model: SlitModel) -> None:
    rows = pattern_table(model, np.linspace(-1, 1, 5))
    assert len(rows) == 5
    assert rows[2].x == 0.0
    assert rows[2].P == pytest.approx(2 * rows[2].rho1)
    assert rows[0].midline == pytest.approx((rows[0].rho1 + rows[0].rho2) / 2)


def test_geometry_from_barrier() -> None:
    barrier = TwoSlitBarrier(-4.0, 1.0, 50.0, (-2.0, 2.0), 1.0)
    geometry = FringeGeometry.from_barrier(barrier, 8.0, 3.0)
    assert geometry.separation == 4.0
    assert geometry.distance == 12.0
    assert geometry.spacing == pytest.approx(2 * math.pi)
    assert geometry.model_k == pytest.approx(1.0)
    with pytest.raises(ValueError, match="towards the screen"):
        FringeGeometry.from_barrier(barrier, 8.0, -3.0)


def test_geometry_from_flight_time() -> None:
    geometry = FringeGeometry.from_flight_time(4.0, 2.0)
    assert geometry.spacing == pytest.approx(math.pi)


def test_fit_recovers_model() -> None:
    y = np.linspace(-20, 20, 401)
    profile = fringe_model(y, 2.0, 0.5, 6.0, 1.3, 0.7)
    fit = fit_fringes(y, profile, 1.25)
    assert fit.k == pytest.approx(1.3, rel=1e-6)
    assert fit.contrast == pytest.approx(0.7, rel=1e-6)
    assert fit.spacing == pytest.approx(2 * math.pi / 1.3, rel=1e-6)


def test_fit_of_empty_profile() -> None:
    with pytest.raises(NoFringesError, match="empty"):
        fit_fringes(np.linspace(0, 1, 5), np.zeros(5), 1.0)


def test_maxima_are_refined() -> None:
    y = np.linspace(-10, 10, 201)
    maxima = fringe_maxima(y, np.cos(y) ** 2 + 0.5)
    assert maxima == pytest.approx(np.pi * np.arange(-3, 4), abs=1e-3)


def test_compare_simulated_screen(screen: Grid) -> None:
    field = _fringe_field(screen, 1.0)
    geometry = FringeGeometry.from_flight_time(4.0, 4.0)
    report = compare_simulated(field, 8.0, geometry, midline_y=0.0)
    assert report.predicted_spacing == pytest.approx(2 * math.pi)
    assert report.spacing_error < 0.03
    assert report.central_offset == pytest.approx(0.0, abs=1e-9)
    assert report.fit is not None
    assert report.fit.k == pytest.approx(1.0, rel=1e-4)


def test_screen_profile_errors(screen: Grid, line: Grid) -> None:
    with pytest.raises(ValueError, match="2D snapshot"):
        screen_profile(WaveField(line, np.ones(line.shape)), 0.0)
    with pytest.raises(ValueError, match="outside the grid"):
        screen_profile(_fringe_field(screen, 1.0), 25.0)


def test_flat_screen_has_no_fringes(screen: Grid) -> None:
    field = WaveField(screen, np.ones(screen.shape))
    geometry = FringeGeometry.from_flight_time(4.0, 4.0)
    with pytest.raises(NoFringesError, match="only 0 maxima"):
        compare_simulated(field, 0.0, geometry, fit=False)


def test_single_slit_fit_has_no_contrast() -> None:
    y = np.linspace(-40, 40, 801)
    fit = fit_fringes(y, fringe_model(y, 1.0, 0.0, 15.0, 1.0, 0.0), 1.0)
    assert fit.contrast < 0.1


def test_single_slit_screen_reports_fit_only(screen: Grid) -> None:
    y = screen.axes[1]
    row = np.sqrt(fringe_model(y, 1.0, 0.0, 6.0, 1.0, 0.0))
    field = WaveField(screen, np.broadcast_to(row, screen.shape))
    geometry = FringeGeometry.from_flight_time(4.0, 4.0)
    report = compare_simulated(field, 8.0, geometry, midline_y=0.0)
    assert report.measured_spacing is None
    assert math.isnan(report.spacing_error)
    assert report.fit is not None
    assert report.fit.contrast < 0.1
    assert report.central_offset == pytest.approx(0.0, abs=0.2)
