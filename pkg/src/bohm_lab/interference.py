# Two-path interference
#
# Analytic pattern of two normal-density paths with a relative phase k x,
# its envelope limits, and the comparison of a simulated screen profile
# against the far-field fringe spacing.

from dataclasses import dataclass

import logging
import math
import numpy as np
from scipy.integrate import quad
from scipy.optimize import curve_fit
from scipy.signal import find_peaks
from typing import List, Optional, Tuple

from .fields import WaveField
from .potentials import TwoSlitBarrier
from .types import RealArray
from .utils import fmt_optional


log = logging.getLogger(__name__)


PEAK_PROMINENCE = 0.05
CENTRAL_FRACTION = 0.2


class NoFringesError(ValueError):
    pass


@dataclass(frozen=True)
class SlitModel:
    x1: float
    x2: float
    sigma: float
    k: float

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not self.k > 0:
            raise ValueError(f"k must be positive, got {self.k}")
        if self.x1 == self.x2:
            raise ValueError("slit images must be distinct")


def _normal(x: np.ndarray, center: float, sigma: float) -> np.ndarray:
    ret: np.ndarray = np.exp(-((x - center) ** 2) / (2 * sigma**2))
    return ret / math.sqrt(2 * math.pi * sigma**2)


def slit_density(model: SlitModel, path: int, x: np.ndarray) -> np.ndarray:
    if path not in (1, 2):
        raise ValueError(f"path must be 1 or 2, got {path}")
    center = model.x1 if path == 1 else model.x2
    return _normal(np.asarray(x, dtype=float), center, model.sigma)


def pattern(model: SlitModel, x: np.ndarray) -> np.ndarray:
    """(rho1 + rho2 + 2 sqrt(rho1 rho2) cos kx) / 2."""
    r1 = slit_density(model, 1, x)
    r2 = slit_density(model, 2, x)
    return 0.5 * (r1 + r2 + 2 * np.sqrt(r1 * r2) * np.cos(model.k * np.asarray(x)))


def midline(model: SlitModel, x: np.ndarray) -> np.ndarray:
    return 0.5 * (slit_density(model, 1, x) + slit_density(model, 2, x))


def envelope(model: SlitModel, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Pointwise (lower, upper) bounds of the pattern over the phase."""
    s1 = np.sqrt(slit_density(model, 1, x))
    s2 = np.sqrt(slit_density(model, 2, x))
    return 0.5 * (s1 - s2) ** 2, 0.5 * (s1 + s2) ** 2


def pattern_integral(model: SlitModel) -> float:
    value, _ = quad(lambda x: float(pattern(model, np.array(x))), -np.inf, np.inf)
    return float(value)


def superposition_density(
    S1: np.ndarray, S2: np.ndarray, J1: np.ndarray, J2: np.ndarray, hbar: float = 1.0
) -> np.ndarray:
    """|exp(-S1 + iJ1/hbar) + exp(-S2 + iJ2/hbar)|^2 / 4."""
    a1 = np.exp(-np.asarray(S1, dtype=float))
    a2 = np.exp(-np.asarray(S2, dtype=float))
    return 0.25 * (  # type: ignore[no-any-return]
        a1**2 + a2**2 + 2 * a1 * a2 * np.cos((np.asarray(J1) - np.asarray(J2)) / hbar)
    )


def superposition_limits(S1: float, S2: float) -> Tuple[float, float]:
    """Upper and lower values of the two-path density over the relative phase."""
    a1 = math.exp(-S1)
    a2 = math.exp(-S2)
    return 0.25 * (a1 + a2) ** 2, 0.25 * (a1 - a2) ** 2


@dataclass(frozen=True)
class PatternRow:
    x: float
    P: float
    midline: float
    rho1: float
    rho2: float


def pattern_table(model: SlitModel, xs: np.ndarray) -> List[PatternRow]:
    xs = np.asarray(xs, dtype=float)
    p = pattern(model, xs)
    mid = midline(model, xs)
    r1 = slit_density(model, 1, xs)
    r2 = slit_density(model, 2, xs)
    return [
        PatternRow(float(x), float(a), float(b), float(c), float(d))
        for x, a, b, c, d in zip(xs, p, mid, r1, r2)
    ]


# #### Simulated screens ####


@dataclass(frozen=True)
class FringeGeometry:
    separation: float
    distance: float
    wavelength: float

    @property
    def spacing(self) -> float:
        """Far-field fringe spacing lambda L / d."""
        return self.wavelength * self.distance / self.separation

    @property
    def model_k(self) -> float:
        """Wavenumber of the cosine along the screen."""
        return 2 * math.pi / self.spacing

    @classmethod
    def from_barrier(
        cls, barrier: TwoSlitBarrier, screen_x: float, wavevector: float
    ) -> "FringeGeometry":
        if not wavevector > 0:
            raise ValueError("the packet must move towards the screen")
        return cls(
            separation=barrier.separation,
            distance=screen_x - barrier.x_wall,
            wavelength=2 * math.pi / wavevector,
        )

    @classmethod
    def from_flight_time(
        cls, separation: float, elapsed: float, hbar: float = 1.0, mass: float = 1.0
    ) -> "FringeGeometry":
        # two sources spreading for time t: lambda L = 2 pi hbar t / m
        return cls(separation, elapsed, 2 * math.pi * hbar / mass)


def fringe_model(
    y: np.ndarray, amp: float, center: float, width: float, k: float, contrast: float
) -> np.ndarray:
    """Coincident-image limit of the two-path pattern with a free contrast."""
    env = np.exp(-((y - center) ** 2) / (2 * width**2))
    ret: np.ndarray = amp * env * (1 + contrast * np.cos(k * (y - center)))
    return ret


@dataclass(frozen=True)
class FringeFit:
    amplitude: float
    center: float
    width: float
    k: float
    contrast: float

    @property
    def spacing(self) -> float:
        return 2 * math.pi / abs(self.k)


def fit_fringes(y: np.ndarray, profile: np.ndarray, k_guess: float) -> FringeFit:
    """Least-squares fit of ``fringe_model`` to a screen profile."""
    y = np.asarray(y, dtype=float)
    profile = np.asarray(profile, dtype=float)
    weight = profile.sum()
    if not weight > 0:
        raise NoFringesError("screen profile is empty")
    center = float((y * profile).sum() / weight)
    width = math.sqrt(max(float(((y - center) ** 2 * profile).sum() / weight), 1e-12))
    p0 = [float(profile.max()), center, width, k_guess, 0.5]
    lower = [0.0, float(y.min()), 1e-6, 0.5 * k_guess, 0.0]
    upper = [np.inf, float(y.max()), np.inf, 2.0 * k_guess, 1.0]
    params, _ = curve_fit(fringe_model, y, profile, p0=p0, bounds=(lower, upper))
    return FringeFit(*(float(p) for p in params))


def _refine_peak(values: np.ndarray, i: int) -> float:
    if i == 0 or i == len(values) - 1:
        return float(i)
    a, b, c = values[i - 1], values[i], values[i + 1]
    den = a - 2 * b + c
    if den == 0:
        return float(i)
    return i + 0.5 * (a - c) / den  # type: ignore[no-any-return]


def fringe_maxima(y: np.ndarray, profile: np.ndarray) -> RealArray:
    """Sub-grid positions of the prominent maxima, parabola-refined."""
    peaks, _ = find_peaks(profile, prominence=PEAK_PROMINENCE * float(profile.max()))
    h = y[1] - y[0]
    return np.array([y[0] + h * _refine_peak(profile, int(i)) for i in peaks])


@dataclass(frozen=True, eq=False)
class FringeReport:
    y: RealArray
    profile: RealArray
    maxima: RealArray
    measured_spacing: Optional[float]
    predicted_spacing: float
    central_offset: float
    fit: Optional[FringeFit]

    @property
    def spacing_error(self) -> float:
        if self.measured_spacing is None:
            return math.nan
        gap = abs(self.measured_spacing - self.predicted_spacing)
        return gap / self.predicted_spacing


def screen_profile(snapshot: WaveField, screen_x: float) -> Tuple[RealArray, RealArray]:
    grid = snapshot.grid
    if grid.dims != 2:
        raise ValueError("a screen needs a 2D snapshot")
    if not grid.mins[0] <= screen_x <= grid.maxs[0]:
        raise ValueError(f"screen at x={screen_x} lies outside the grid")
    i = grid.nearest_index((screen_x, grid.mins[1]))[0]
    return grid.axes[1], np.abs(snapshot.amplitude[i]) ** 2


def compare_simulated(
    snapshot: WaveField,
    screen_x: float,
    geometry: FringeGeometry,
    midline_y: Optional[float] = None,
    fit: bool = True,
) -> FringeReport:
    """Measure fringes on the line x = screen_x and compare them with lambda L / d.

    The measured spacing is the median gap between the central maxima,
    those above a fifth of the brightest one.  A screen without fringes
    still gets a report when the fit is requested, with no measured spacing;
    the fitted contrast then tells whether a second path is present.
    """
    y, profile = screen_profile(snapshot, screen_x)
    fitted = fit_fringes(y, profile, geometry.model_k) if fit else None
    maxima = fringe_maxima(y, profile)
    heights = np.interp(maxima, y, profile)
    spacing: Optional[float] = None
    problem: Optional[str] = None
    if len(maxima) < 3:
        problem = f"only {len(maxima)} maxima found on the screen"
    else:
        central = np.sort(maxima[heights >= CENTRAL_FRACTION * heights.max()])
        if len(central) < 2:
            problem = "fewer than two central fringes"
        else:
            spacing = float(np.median(np.diff(central)))
    if problem is not None:
        if fitted is None:
            raise NoFringesError(problem)
        log.warning("%s, reporting the fit only", problem)
    if midline_y is None:
        midline_y = 0.5 * (snapshot.grid.mins[1] + snapshot.grid.maxs[1])
    if len(maxima):
        brightest = float(maxima[np.argmax(heights)])
    else:
        brightest = float(y[np.argmax(profile)])
    report = FringeReport(
        y=y,
        profile=profile,
        maxima=maxima,
        measured_spacing=spacing,
        predicted_spacing=geometry.spacing,
        central_offset=brightest - midline_y,
        fit=fitted,
    )
    log.info(
        "fringe spacing %s, predicted %.6g (%s%% off)",
        fmt_optional(spacing, ".6g"),
        geometry.spacing,
        fmt_optional(100 * report.spacing_error, ".2f"),
    )
    return report
