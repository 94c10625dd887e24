# Experiment config AST
#
# Every node keeps the position of its YAML source so that the resolution
# step can point at the offending line. Values are not validated here.

from dataclasses import dataclass

from typing import Any, Optional

from .types import LocalPath


@dataclass(frozen=True)
class Pos:
    line: int
    col: int
    filename: LocalPath


@dataclass(frozen=True)
class Base:
    _start: Pos
    _end: Pos


@dataclass(frozen=True)
class Value(Base):
    # A scalar or an inline list, constructed by the safe YAML constructor
    value: Any


@dataclass(frozen=True)
class Section(Base):
    pass


@dataclass(frozen=True)
class Units(Section):
    system: Optional[Value] = None
    hbar: Optional[Value] = None
    mass: Optional[Value] = None
    reverse_velocity: Optional[Value] = None


@dataclass(frozen=True)
class Grid(Section):
    dims: Optional[Value] = None
    min: Optional[Value] = None
    max: Optional[Value] = None
    points: Optional[Value] = None
    endpoint: Optional[Value] = None


@dataclass(frozen=True)
class Initial(Section):
    state: Optional[Value] = None
    center: Optional[Value] = None
    sigma: Optional[Value] = None
    wavevector: Optional[Value] = None
    time: Optional[Value] = None
    level: Optional[Value] = None
    omega: Optional[Value] = None
    winding: Optional[Value] = None
    width: Optional[Value] = None
    centers: Optional[Value] = None
    path: Optional[Value] = None


@dataclass(frozen=True)
class Potential(Section):
    kind: Optional[Value] = None
    value: Optional[Value] = None
    omega: Optional[Value] = None
    center: Optional[Value] = None
    x_wall: Optional[Value] = None
    thickness: Optional[Value] = None
    height: Optional[Value] = None
    slit_centers: Optional[Value] = None
    slit_width: Optional[Value] = None


@dataclass(frozen=True)
class Evolution(Section):
    dt: Optional[Value] = None
    steps: Optional[Value] = None
    snapshot_stride: Optional[Value] = None
    method: Optional[Value] = None
    backward: Optional[Value] = None


@dataclass(frozen=True)
class Trajectories(Section):
    enabled: Optional[Value] = None
    particles: Optional[Value] = None
    seed: Optional[Value] = None
    bins: Optional[Value] = None


@dataclass(frozen=True)
class Diagnostics(Section):
    enabled: Optional[Value] = None
    backend: Optional[Value] = None
    rho_floor: Optional[Value] = None
    residuals: Optional[Value] = None
    residual_index: Optional[Value] = None
    complexified: Optional[Value] = None
    probes: Optional[Value] = None
    energy: Optional[Value] = None
    circulation_loops: Optional[Value] = None
    reference_point: Optional[Value] = None
    export_fields: Optional[Value] = None


@dataclass(frozen=True)
class Assertions(Section):
    max_norm_drift: Optional[Value] = None
    max_hj_residual: Optional[Value] = None
    max_continuity_residual: Optional[Value] = None
    max_entropy_residual: Optional[Value] = None
    max_form_disagreement: Optional[Value] = None
    max_gradient_identity: Optional[Value] = None
    uniform_energy_tolerance: Optional[Value] = None
    assessment_floor: Optional[Value] = None
    max_crossings: Optional[Value] = None
    max_tv_distance: Optional[Value] = None
    circulation_turns: Optional[Value] = None
    circulation_tolerance: Optional[Value] = None
    max_fringe_spacing_error: Optional[Value] = None
    max_propagator_error: Optional[Value] = None
    max_semigroup_defect: Optional[Value] = None
    max_theta_spread: Optional[Value] = None
    max_lattice_norm_drift: Optional[Value] = None
    max_lattice_state_error: Optional[Value] = None


@dataclass(frozen=True)
class Interference(Section):
    enabled: Optional[Value] = None
    x1: Optional[Value] = None
    x2: Optional[Value] = None
    sigma: Optional[Value] = None
    k: Optional[Value] = None
    range: Optional[Value] = None
    points: Optional[Value] = None
    screen_x: Optional[Value] = None
    midline_y: Optional[Value] = None
    fit: Optional[Value] = None


@dataclass(frozen=True)
class Propagator(Section):
    enabled: Optional[Value] = None
    system: Optional[Value] = None
    omega: Optional[Value] = None
    slices: Optional[Value] = None
    theta: Optional[Value] = None
    total_time: Optional[Value] = None
    x_start: Optional[Value] = None
    x_end: Optional[Value] = None
    rule: Optional[Value] = None
    t_mid: Optional[Value] = None


@dataclass(frozen=True)
class Output(Section):
    directory: Optional[Value] = None
    snapshots: Optional[Value] = None
    field_csv: Optional[Value] = None


@dataclass(frozen=True)
class Experiment(Base):
    units: Optional[Units] = None
    grid: Optional[Grid] = None
    initial: Optional[Initial] = None
    potential: Optional[Potential] = None
    evolution: Optional[Evolution] = None
    trajectories: Optional[Trajectories] = None
    diagnostics: Optional[Diagnostics] = None
    assertions: Optional[Assertions] = None
    interference: Optional[Interference] = None
    propagator: Optional[Propagator] = None
    output: Optional[Output] = None
