# Experiment configuration
#
# Resolution turns the parsed ast into frozen config objects with every
# default filled in, broadcasting scalars to per-axis tuples. Any invalid
# value raises ConfigError naming the key and its position in the file.

from dataclasses import dataclass, field, fields

import enum
import logging
import math
from typing import (
    Any,
    Callable,
    Dict,
    List,
    Optional,
    TextIO,
    Tuple,
    Type,
    TypeVar,
    Union,
    cast,
)

from . import ast
from .constants import reverse_velocity_constant
from .evolve import EvolutionPlan, Method
from .field_io import read_field
from .fields import (
    WaveField,
    free_gaussian,
    gaussian_packet,
    gaussian_pair,
    harmonic_eigenstate,
    plane_wave,
    vortex_state,
)
from .grid import MIN_POINTS, Grid, GridError, make_grid
from .parser import ConfigError, parse_experiment, parse_experiment_stream
from .potentials import (
    ConstantPotential,
    FreePotential,
    HarmonicPotential,
    PotentialError,
    PotentialKind,
    PotentialSpec,
    TwoSlitBarrier,
)
from .propagator import MAX_THETA
from .types import (
    DerivativeBackend,
    LocalPath,
    PotentialRule,
    PropagatorSystem,
    StateKind,
    UnitSystem,
)
from .utils import fmt_float


log = logging.getLogger(__name__)


DEFAULT_OUTPUT = "bohm-lab-output"

Vec = Tuple[float, ...]
Loop = Tuple[Vec, Vec]

_E = TypeVar("_E", bound=enum.Enum)


# #### Config objects ####


@dataclass(frozen=True)
class UnitsConfig:
    system: UnitSystem = UnitSystem.NATURAL
    hbar: float = 1.0
    mass: float = 1.0
    reverse_velocity: float = reverse_velocity_constant()


@dataclass(frozen=True)
class GridConfig:
    dims: int
    mins: Vec = field(metadata={"key": "min"})
    maxs: Vec = field(metadata={"key": "max"})
    points: Tuple[int, ...]
    # False: the upper extent is the period end and is not sampled
    endpoint: bool = False

    def build(self) -> Grid:
        return make_grid(
            self.dims,
            list(zip(self.mins, self.maxs)),
            self.points,
            endpoint=self.endpoint,
        )


@dataclass(frozen=True)
class InitialConfig:
    state: StateKind = StateKind.GAUSSIAN
    center: Vec = ()
    sigma: float = 1.0
    wavevector: Vec = ()
    time: float = 0.0
    level: Tuple[int, ...] = ()
    omega: float = 1.0
    winding: int = 1
    width: float = 1.0
    centers: Optional[Tuple[Vec, Vec]] = None
    path: Optional[str] = None

    def build(
        self, grid: Grid, units: UnitsConfig, base_dir: Optional[LocalPath] = None
    ) -> WaveField:
        hbar, mass = units.hbar, units.mass
        if self.state == StateKind.GAUSSIAN:
            return gaussian_packet(
                grid, self.center, self.sigma, self.wavevector, hbar=hbar, mass=mass
            )
        if self.state == StateKind.FREE_GAUSSIAN:
            return free_gaussian(
                grid,
                self.center,
                self.sigma,
                self.wavevector,
                self.time,
                hbar=hbar,
                mass=mass,
            )
        if self.state == StateKind.PLANE_WAVE:
            return plane_wave(grid, self.wavevector, hbar=hbar, mass=mass)
        if self.state == StateKind.HARMONIC:
            return harmonic_eigenstate(
                grid, self.level, self.omega, self.center, hbar=hbar, mass=mass
            )
        if self.state == StateKind.VORTEX:
            return vortex_state(
                grid, self.winding, self.center, self.width, hbar=hbar, mass=mass
            )
        if self.state == StateKind.GAUSSIAN_PAIR:
            assert self.centers is not None
            return gaussian_pair(
                grid,
                self.centers,
                self.sigma,
                [self.wavevector, self.wavevector],
                hbar=hbar,
                mass=mass,
            )
        assert self.state == StateKind.FILE and self.path is not None
        path = LocalPath(self.path)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        ret = read_field(path, hbar=hbar, mass=mass)
        if ret.grid != grid:
            raise ConfigError(
                f"initial.path: field in {path} is sampled on a different grid",
                "path",
                None,
            )
        return ret


@dataclass(frozen=True)
class PotentialConfig:
    kind: PotentialKind = PotentialKind.FREE
    value: float = 0.0
    omega: float = 1.0
    center: Optional[Vec] = None
    x_wall: float = 0.0
    thickness: float = 0.5
    height: float = 50.0
    slit_centers: Optional[Tuple[float, float]] = None
    slit_width: Optional[float] = None

    def spec(self) -> PotentialSpec:
        if self.kind == PotentialKind.CONSTANT:
            return ConstantPotential(self.value)
        if self.kind == PotentialKind.HARMONIC:
            return HarmonicPotential(self.omega, self.center)
        if self.kind == PotentialKind.TWO_SLIT:
            assert self.slit_centers is not None and self.slit_width is not None
            return TwoSlitBarrier(
                x_wall=self.x_wall,
                thickness=self.thickness,
                height=self.height,
                slit_centers=self.slit_centers,
                slit_width=self.slit_width,
            )
        return FreePotential()


@dataclass(frozen=True)
class EvolutionConfig:
    dt: float
    steps: int
    snapshot_stride: int = 1
    method: Method = Method.STRANG
    backward: bool = False

    def plan(self) -> EvolutionPlan:
        return EvolutionPlan(
            self.dt, self.steps, self.snapshot_stride, self.method, self.backward
        )


@dataclass(frozen=True)
class TrajectoriesConfig:
    enabled: bool = False
    particles: int = 1000
    seed: int = 0
    bins: int = 50


@dataclass(frozen=True)
class DiagnosticsConfig:
    enabled: bool = False
    backend: DerivativeBackend = DerivativeBackend.SPECTRAL
    rho_floor: float = 1e-12
    residuals: bool = True
    residual_index: Optional[int] = None
    complexified: bool = True
    probes: bool = True
    energy: bool = True
    circulation_loops: Tuple[Loop, ...] = ()
    reference_point: Optional[Vec] = None
    export_fields: bool = True


@dataclass(frozen=True)
class AssertionsConfig:
    max_norm_drift: Optional[float] = None
    max_hj_residual: Optional[float] = None
    max_continuity_residual: Optional[float] = None
    max_entropy_residual: Optional[float] = None
    max_form_disagreement: Optional[float] = None
    max_gradient_identity: Optional[float] = None
    uniform_energy_tolerance: Optional[float] = None
    assessment_floor: float = 1e-6
    max_crossings: Optional[int] = None
    max_tv_distance: Optional[float] = None
    circulation_turns: Optional[Tuple[int, ...]] = None
    circulation_tolerance: float = 1e-6
    max_fringe_spacing_error: Optional[float] = None
    max_propagator_error: Optional[float] = None
    max_semigroup_defect: Optional[float] = None
    max_theta_spread: Optional[float] = None
    max_lattice_norm_drift: Optional[float] = None
    max_lattice_state_error: Optional[float] = None


@dataclass(frozen=True)
class InterferenceConfig:
    enabled: bool = False
    x1: float = 0.5
    x2: float = -0.5
    sigma: float = 1.0
    k: float = 2.0
    x_range: Tuple[float, float] = field(default=(-6.0, 6.0), metadata={"key": "range"})
    points: int = 241
    screen_x: Optional[float] = None
    midline_y: Optional[float] = None
    fit: bool = True


@dataclass(frozen=True)
class PropagatorConfig:
    enabled: bool = False
    system: PropagatorSystem = PropagatorSystem.HARMONIC
    omega: float = 1.0
    slices: Tuple[int, ...] = (8, 16, 32, 64)
    theta: float = 0.02
    total_time: float = math.pi / 2
    x_start: float = 0.0
    x_end: float = 1.0
    rule: PotentialRule = PotentialRule.ENDPOINT
    t_mid: Optional[float] = None

    def spec(self) -> PotentialSpec:
        if self.system == PropagatorSystem.HARMONIC:
            return HarmonicPotential(self.omega)
        return FreePotential()


@dataclass(frozen=True)
class OutputConfig:
    directory: str = DEFAULT_OUTPUT
    snapshots: bool = True
    field_csv: bool = True


@dataclass(frozen=True)
class ExperimentConfig:
    units: UnitsConfig = UnitsConfig()
    grid: Optional[GridConfig] = None
    initial: Optional[InitialConfig] = None
    potential: Optional[PotentialConfig] = None
    evolution: Optional[EvolutionConfig] = None
    trajectories: TrajectoriesConfig = TrajectoriesConfig()
    diagnostics: DiagnosticsConfig = DiagnosticsConfig()
    assertions: AssertionsConfig = AssertionsConfig()
    interference: InterferenceConfig = InterferenceConfig()
    propagator: PropagatorConfig = PropagatorConfig()
    output: OutputConfig = OutputConfig()
    # Relative paths in the config are taken from here
    base_dir: Optional[LocalPath] = field(default=None, compare=False)

    @property
    def simulates(self) -> bool:
        return self.grid is not None


# #### Resolution ####


_MISSING: Any = object()


class _SectionReader:
    def __init__(self, name: str, node: Optional[ast.Section], owner: ast.Base) -> None:
        self._name = name
        self._node = node
        self._pos = node._start if node is not None else owner._start

    @property
    def present(self) -> bool:
        return self._node is not None

    def item(self, key: str) -> Optional[ast.Value]:
        if self._node is None:
            return None
        return cast(Optional[ast.Value], getattr(self._node, key))

    def error(self, key: str, msg: str) -> ConfigError:
        item = self.item(key)
        pos = item._start if item is not None else self._pos
        return ConfigError(f"{self._name}.{key}: {msg}", key, pos)

    def _get(self, key: str, default: Any) -> Any:
        item = self.item(key)
        if item is None or item.value is None:
            if default is _MISSING:
                raise self.error(key, "missing mandatory key")
            return default
        return item.value

    def _convert(self, key: str, value: Any, kind: str) -> Any:
        if kind == "bool":
            if not isinstance(value, bool):
                raise self.error(key, f"expected a boolean, got {value!r}")
            return value
        if kind == "int":
            if isinstance(value, bool) or not isinstance(value, int):
                raise self.error(key, f"expected an integer, got {value!r}")
            return value
        if isinstance(value, bool) or not isinstance(value, (int, float, str)):
            raise self.error(key, f"expected a number, got {value!r}")
        try:
            ret = float(value)
        except ValueError:
            raise self.error(key, f"expected a number, got {value!r}")
        if not math.isfinite(ret):
            raise self.error(key, f"must be finite, got {value!r}")
        return ret

    def boolean(self, key: str, default: Any = _MISSING) -> bool:
        return cast(bool, self._convert(key, self._get(key, default), "bool"))

    def integer(
        self, key: str, default: Any = _MISSING, *, minimum: Optional[int] = None
    ) -> int:
        ret = cast(int, self._convert(key, self._get(key, default), "int"))
        if minimum is not None and ret < minimum:
            raise self.error(key, f"must be >= {minimum}, got {ret}")
        return ret

    def opt_integer(self, key: str, *, minimum: Optional[int] = None) -> Optional[int]:
        if self._get(key, None) is None:
            return None
        return self.integer(key, minimum=minimum)

    def real(
        self,
        key: str,
        default: Any = _MISSING,
        *,
        positive: bool = False,
        nonneg: bool = False,
    ) -> float:
        ret = cast(float, self._convert(key, self._get(key, default), "float"))
        if positive and not ret > 0:
            raise self.error(key, f"must be positive, got {ret}")
        if nonneg and ret < 0:
            raise self.error(key, f"must be non-negative, got {ret}")
        return ret

    def opt_real(
        self, key: str, *, positive: bool = False, nonneg: bool = False
    ) -> Optional[float]:
        if self._get(key, None) is None:
            return None
        return self.real(key, positive=positive, nonneg=nonneg)

    def choice(self, key: str, enum_type: Type[_E], default: Any = _MISSING) -> _E:
        value = self._get(key, default)
        if isinstance(value, enum_type):
            return value
        try:
            return enum_type(str(value))
        except ValueError:
            allowed = ", ".join(str(e.value) for e in enum_type)
            raise self.error(key, f"unknown value {value!r}, expected one of {allowed}")

    def text(self, key: str, default: Any = _MISSING) -> str:
        value = self._get(key, default)
        if not isinstance(value, str):
            raise self.error(key, f"expected a string, got {value!r}")
        return value

    def sequence(
        self, key: str, default: Any = _MISSING, *, length: Optional[int] = None
    ) -> List[Any]:
        value = self._get(key, default)
        if not isinstance(value, (list, tuple)):
            raise self.error(key, f"expected a list, got {value!r}")
        if length is not None and len(value) != length:
            raise self.error(key, f"expected {length} items, got {len(value)}")
        return list(value)

    def vector(self, key: str, dims: int, default: Any = _MISSING) -> Vec:
        value = self._get(key, default)
        if isinstance(value, (list, tuple)):
            if len(value) != dims:
                raise self.error(key, f"expected {dims} components, got {len(value)}")
            return tuple(self._convert(key, v, "float") for v in value)
        return (self._convert(key, value, "float"),) * dims

    def opt_vector(self, key: str, dims: int) -> Optional[Vec]:
        if self._get(key, None) is None:
            return None
        return self.vector(key, dims)


def _resolve_units(r: _SectionReader) -> UnitsConfig:
    defaults = UnitsConfig()
    return UnitsConfig(
        system=r.choice("system", UnitSystem, defaults.system),
        hbar=r.real("hbar", defaults.hbar, positive=True),
        mass=r.real("mass", defaults.mass, positive=True),
        reverse_velocity=r.real(
            "reverse_velocity", defaults.reverse_velocity, positive=True
        ),
    )


def _resolve_grid(r: _SectionReader) -> GridConfig:
    dims = r.integer("dims", 1)
    if dims not in (1, 2):
        raise r.error("dims", f"only 1 or 2 dimensions are supported, got {dims}")
    mins = r.vector("min", dims)
    maxs = r.vector("max", dims)
    for lo, hi in zip(mins, maxs):
        if not hi > lo:
            raise r.error("max", f"must exceed min on every axis, got [{lo}, {hi}]")
    raw = r._get("points", 256)
    if isinstance(raw, (list, tuple)):
        if len(raw) != dims:
            raise r.error("points", f"expected {dims} components, got {len(raw)}")
        points = tuple(r._convert("points", p, "int") for p in raw)
    else:
        points = (r._convert("points", raw, "int"),) * dims
    if min(points) < MIN_POINTS:
        raise r.error("points", f"must be >= {MIN_POINTS} on every axis")
    ret = GridConfig(dims, mins, maxs, points, r.boolean("endpoint", False))
    try:
        ret.build()
    except GridError as exc:
        raise r.error("points", str(exc))
    return ret


def _resolve_initial(r: _SectionReader, dims: int) -> InitialConfig:
    state = r.choice("state", StateKind, StateKind.GAUSSIAN)
    default_level: Any = [0] * dims
    raw_level = r._get("level", default_level)
    if isinstance(raw_level, (list, tuple)):
        level = tuple(r._convert("level", n, "int") for n in raw_level)
        if len(level) != dims:
            raise r.error("level", f"expected {dims} components, got {len(level)}")
    else:
        level = (r._convert("level", raw_level, "int"),) + (0,) * (dims - 1)
    if min(level) < 0:
        raise r.error("level", "oscillator levels must be >= 0")
    centers: Optional[Tuple[Vec, Vec]] = None
    if r._get("centers", None) is not None:
        items = r.sequence("centers", length=2)
        pair = []
        for item in items:
            if isinstance(item, (list, tuple)):
                if len(item) != dims:
                    raise r.error("centers", f"each center needs {dims} components")
                pair.append(tuple(r._convert("centers", v, "float") for v in item))
            else:
                pair.append((r._convert("centers", item, "float"),) * dims)
        centers = (pair[0], pair[1])
    ret = InitialConfig(
        state=state,
        center=r.vector("center", dims, 0.0),
        sigma=r.real("sigma", 1.0, positive=True),
        wavevector=r.vector("wavevector", dims, 0.0),
        time=r.real("time", 0.0),
        level=level,
        omega=r.real("omega", 1.0, positive=True),
        winding=r.integer("winding", 1),
        width=r.real("width", 1.0, positive=True),
        centers=centers,
        path=r.text("path") if r._get("path", None) is not None else None,
    )
    if state == StateKind.VORTEX and dims != 2:
        raise r.error("state", "a vortex state needs a 2D grid")
    if state == StateKind.GAUSSIAN_PAIR and centers is None:
        raise r.error("centers", "a Gaussian pair needs two centers")
    if state == StateKind.FILE and ret.path is None:
        raise r.error("path", "a field file is required for state 'file'")
    return ret


def _resolve_potential(r: _SectionReader, grid: Grid) -> PotentialConfig:
    kind = r.choice("kind", PotentialKind, PotentialKind.FREE)
    if kind == PotentialKind.CUSTOM:
        raise r.error("kind", "sampled potentials cannot be configured from a file")
    slit_centers: Optional[Tuple[float, float]] = None
    if r._get("slit_centers", None) is not None:
        c1, c2 = (
            r._convert("slit_centers", v, "float")
            for v in r.sequence("slit_centers", length=2)
        )
        slit_centers = (c1, c2)
    ret = PotentialConfig(
        kind=kind,
        value=r.real("value", 0.0),
        omega=r.real("omega", 1.0, positive=True),
        center=r.opt_vector("center", grid.dims),
        x_wall=r.real("x_wall", 0.0),
        thickness=r.real("thickness", 0.5, positive=True),
        height=r.real("height", 50.0, nonneg=True),
        slit_centers=slit_centers,
        slit_width=r.opt_real("slit_width", positive=True),
    )
    if kind == PotentialKind.TWO_SLIT:
        if slit_centers is None:
            raise r.error("slit_centers", "a two-slit barrier needs two slit centers")
        if ret.slit_width is None:
            raise r.error("slit_width", "a two-slit barrier needs a slit width")
    try:
        ret.spec().validate(grid)
    except PotentialError as exc:
        raise r.error("kind", str(exc))
    return ret


def _resolve_evolution(r: _SectionReader) -> EvolutionConfig:
    if not r.present:
        raise r.error("dt", "an evolution section is required with a grid")
    return EvolutionConfig(
        dt=r.real("dt", positive=True),
        steps=r.integer("steps", minimum=1),
        snapshot_stride=r.integer("snapshot_stride", 1, minimum=1),
        method=r.choice("method", Method, Method.STRANG),
        backward=r.boolean("backward", False),
    )


def _resolve_trajectories(r: _SectionReader) -> TrajectoriesConfig:
    return TrajectoriesConfig(
        enabled=r.boolean("enabled", r.present),
        particles=r.integer("particles", 1000, minimum=1),
        seed=r.integer("seed", 0, minimum=0),
        bins=r.integer("bins", 50, minimum=2),
    )


def _loop(r: _SectionReader, item: Any) -> Loop:
    if not isinstance(item, (list, tuple)) or len(item) != 2:
        raise r.error("circulation_loops", "a loop is a pair of opposite corners")
    corners = []
    for corner in item:
        if not isinstance(corner, (list, tuple)) or len(corner) != 2:
            raise r.error("circulation_loops", "a loop corner needs two coordinates")
        corners.append(
            tuple(r._convert("circulation_loops", v, "float") for v in corner)
        )
    return (corners[0], corners[1])


def _resolve_diagnostics(
    r: _SectionReader, dims: int, snapshot_count: int
) -> DiagnosticsConfig:
    loops = tuple(_loop(r, item) for item in r.sequence("circulation_loops", []))
    if loops and dims != 2:
        raise r.error("circulation_loops", "circulation loops need a 2D grid")
    ret = DiagnosticsConfig(
        enabled=r.boolean("enabled", r.present),
        backend=r.choice("backend", DerivativeBackend, DerivativeBackend.SPECTRAL),
        rho_floor=r.real("rho_floor", 1e-12, positive=True),
        residuals=r.boolean("residuals", True),
        residual_index=r.opt_integer("residual_index", minimum=1),
        complexified=r.boolean("complexified", True),
        probes=r.boolean("probes", True),
        energy=r.boolean("energy", True),
        circulation_loops=loops,
        reference_point=r.opt_vector("reference_point", dims),
        export_fields=r.boolean("export_fields", True),
    )
    if ret.enabled and (ret.residuals or ret.complexified):
        if snapshot_count < 3:
            raise r.error(
                "residuals", "time residuals need at least three snapshots"
            )
        if ret.residual_index is not None and ret.residual_index >= snapshot_count - 1:
            raise r.error(
                "residual_index",
                f"must lie strictly inside the {snapshot_count} snapshots",
            )
    return ret


def _resolve_assertions(r: _SectionReader) -> AssertionsConfig:
    turns: Optional[Tuple[int, ...]] = None
    if r._get("circulation_turns", None) is not None:
        turns = tuple(
            r._convert("circulation_turns", v, "int")
            for v in r.sequence("circulation_turns")
        )
    return AssertionsConfig(
        max_norm_drift=r.opt_real("max_norm_drift", nonneg=True),
        max_hj_residual=r.opt_real("max_hj_residual", nonneg=True),
        max_continuity_residual=r.opt_real("max_continuity_residual", nonneg=True),
        max_entropy_residual=r.opt_real("max_entropy_residual", nonneg=True),
        max_form_disagreement=r.opt_real("max_form_disagreement", nonneg=True),
        max_gradient_identity=r.opt_real("max_gradient_identity", nonneg=True),
        uniform_energy_tolerance=r.opt_real("uniform_energy_tolerance", nonneg=True),
        assessment_floor=r.real("assessment_floor", 1e-6, positive=True),
        max_crossings=r.opt_integer("max_crossings", minimum=0),
        max_tv_distance=r.opt_real("max_tv_distance", nonneg=True),
        circulation_turns=turns,
        circulation_tolerance=r.real("circulation_tolerance", 1e-6, positive=True),
        max_fringe_spacing_error=r.opt_real("max_fringe_spacing_error", nonneg=True),
        max_propagator_error=r.opt_real("max_propagator_error", nonneg=True),
        max_semigroup_defect=r.opt_real("max_semigroup_defect", nonneg=True),
        max_theta_spread=r.opt_real("max_theta_spread", nonneg=True),
        max_lattice_norm_drift=r.opt_real("max_lattice_norm_drift", nonneg=True),
        max_lattice_state_error=r.opt_real("max_lattice_state_error", nonneg=True),
    )


def _resolve_interference(r: _SectionReader) -> InterferenceConfig:
    lo, hi = (
        r._convert("range", v, "float")
        for v in r.sequence("range", [-6.0, 6.0], length=2)
    )
    if not hi > lo:
        raise r.error("range", f"empty range [{lo}, {hi}]")
    ret = InterferenceConfig(
        enabled=r.boolean("enabled", r.present),
        x1=r.real("x1", 0.5),
        x2=r.real("x2", -0.5),
        sigma=r.real("sigma", 1.0, positive=True),
        k=r.real("k", 2.0, positive=True),
        x_range=(lo, hi),
        points=r.integer("points", 241, minimum=2),
        screen_x=r.opt_real("screen_x"),
        midline_y=r.opt_real("midline_y"),
        fit=r.boolean("fit", True),
    )
    if ret.x1 == ret.x2:
        raise r.error("x2", "the two slit images must be distinct")
    return ret


def _resolve_propagator(r: _SectionReader) -> PropagatorConfig:
    slices = tuple(
        r._convert("slices", v, "int")
        for v in r.sequence("slices", [8, 16, 32, 64])
    )
    if not slices or min(slices) < 1:
        raise r.error("slices", "slice counts must be >= 1")
    if any(b <= a for a, b in zip(slices, slices[1:])):
        raise r.error("slices", "slice counts must be increasing")
    theta = r.real("theta", 0.02, nonneg=True)
    if theta > MAX_THETA:
        raise r.error("theta", f"must not exceed {MAX_THETA}, got {theta}")
    ret = PropagatorConfig(
        enabled=r.boolean("enabled", r.present),
        system=r.choice("system", PropagatorSystem, PropagatorSystem.HARMONIC),
        omega=r.real("omega", 1.0, positive=True),
        slices=slices,
        theta=theta,
        total_time=r.real("total_time", math.pi / 2, positive=True),
        x_start=r.real("x_start", 0.0),
        x_end=r.real("x_end", 1.0),
        rule=r.choice("rule", PotentialRule, PotentialRule.ENDPOINT),
        t_mid=r.opt_real("t_mid", positive=True),
    )
    if ret.t_mid is not None and not ret.t_mid < ret.total_time:
        raise r.error("t_mid", "must lie strictly inside the propagation time")
    if ret.enabled and ret.theta == 0 and ret.slices[-1] > 1:
        raise r.error("theta", "lattice integration needs a positive theta")
    return ret


def _resolve_output(r: _SectionReader) -> OutputConfig:
    return OutputConfig(
        directory=r.text("directory", DEFAULT_OUTPUT),
        snapshots=r.boolean("snapshots", True),
        field_csv=r.boolean("field_csv", True),
    )


SIMULATION_SECTIONS = (
    "initial",
    "potential",
    "evolution",
    "trajectories",
    "diagnostics",
)


def resolve(
    experiment: ast.Experiment, base_dir: Optional[LocalPath] = None
) -> ExperimentConfig:
    def reader(name: str) -> _SectionReader:
        return _SectionReader(name, getattr(experiment, name), experiment)

    units = _resolve_units(reader("units"))
    if experiment.grid is None:
        for name in SIMULATION_SECTIONS:
            section = getattr(experiment, name)
            if section is not None:
                raise ConfigError(
                    f"{name}: section requires a grid section", name, section._start
                )
        grid_cfg = None
        initial = potential = evolution = None
        trajectories = TrajectoriesConfig()
        diagnostics = DiagnosticsConfig()
        dims = 0
    else:
        grid_cfg = _resolve_grid(reader("grid"))
        grid = grid_cfg.build()
        dims = grid.dims
        initial = _resolve_initial(reader("initial"), dims)
        potential = _resolve_potential(reader("potential"), grid)
        evolution = _resolve_evolution(reader("evolution"))
        trajectories = _resolve_trajectories(reader("trajectories"))
        if trajectories.enabled and evolution.backward:
            raise reader("trajectories").error(
                "enabled", "trajectories need a forward evolution"
            )
        diagnostics = _resolve_diagnostics(
            reader("diagnostics"), dims, len(evolution.plan().snapshot_steps())
        )
    interference = _resolve_interference(reader("interference"))
    if interference.enabled and interference.screen_x is not None and dims != 2:
        raise reader("interference").error(
            "screen_x", "a simulated screen needs a 2D grid"
        )
    return ExperimentConfig(
        units=units,
        grid=grid_cfg,
        initial=initial,
        potential=potential,
        evolution=evolution,
        trajectories=trajectories,
        diagnostics=diagnostics,
        assertions=_resolve_assertions(reader("assertions")),
        interference=interference,
        propagator=_resolve_propagator(reader("propagator")),
        output=_resolve_output(reader("output")),
        base_dir=base_dir,
    )


def parse_config(text: Union[str, TextIO]) -> ExperimentConfig:
    return resolve(parse_experiment_stream(text))


def load_config(config_file: LocalPath) -> ExperimentConfig:
    ret = resolve(parse_experiment(config_file), config_file.parent)
    log.debug("Loaded %s", config_file)
    return ret


# #### Effective config ####


def _emit_value(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, enum.Enum):
        return str(value.value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return fmt_float(value)
    if isinstance(value, (tuple, list)):
        return "[" + ", ".join(_emit_value(v) for v in value) + "]"
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    raise TypeError(f"cannot emit {value!r}")


def _emit_section(name: str, section: Any, lines: List[str]) -> None:
    lines.append(f"{name}:")
    for f in fields(section):
        key = f.metadata.get("key", f.name)
        lines.append(f"  {key}: {_emit_value(getattr(section, f.name))}")


_EMITTERS: Dict[str, Callable[[ExperimentConfig], Any]] = {
    "units": lambda c: c.units,
    "grid": lambda c: c.grid,
    "initial": lambda c: c.initial,
    "potential": lambda c: c.potential,
    "evolution": lambda c: c.evolution,
    "trajectories": lambda c: c.trajectories if c.simulates else None,
    "diagnostics": lambda c: c.diagnostics if c.simulates else None,
    "assertions": lambda c: c.assertions,
    "interference": lambda c: c.interference,
    "propagator": lambda c: c.propagator,
    "output": lambda c: c.output,
}


def emit_config(config: ExperimentConfig) -> str:
    """Effective config with every default spelled out."""
    lines: List[str] = []
    for name, getter in _EMITTERS.items():
        section = getter(config)
        if section is None:
            continue
        if lines:
            lines.append("")
        _emit_section(name, section, lines)
    return "\n".join(lines) + "\n"
