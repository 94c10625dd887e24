# Experiment runner
#
# A run is a small graph of stages: evolve, decompose, diagnostics,
# trajectories, interference, propagator and constants. Every stage writes
# its files below the output directory and records summaries and assertion
# outcomes; report.txt lists them together with the file checksums.

from dataclasses import dataclass, field

import datetime
import logging
import math
import numpy as np
import scipy.fft
from pathlib import Path
from typing import (
    AbstractSet,
    Callable,
    Dict,
    Iterable,
    List,
    Optional,
    Sequence,
    Tuple,
)

import bohm_lab

from .bohm import (
    BohmFields,
    decompose,
    density_mask,
    hj_residual,
    continuity_residual,
    energy_budget,
    entropy_balance_residual,
    quantum_potential,
    reconstruct,
)
from .complexified import (
    circulation,
    complexified_hj_residual,
    epsilon_dot_check,
    gradient_square_identity,
    legendre_identities,
    taylor_probe_b1,
    taylor_probe_b2,
)
from .config import ExperimentConfig
from .constants import PARTICLE_MASSES, radius_table, universal_constants
from .evolve import Evolution, EvolutionPlan, evolve
from .field_io import (
    write_bohm_csv,
    write_convergence_csv,
    write_csv,
    write_field_csv,
    write_pattern_csv,
    write_profile_csv,
    write_snapshots,
    write_trajectories_csv,
)
from .fields import norm
from .interference import (
    FringeGeometry,
    SlitModel,
    compare_simulated,
    pattern,
    pattern_integral,
    pattern_table,
)
from .potentials import Potential, TwoSlitBarrier, build_potential
from .propagator import (
    LatticeSpec,
    convergence_study,
    propagate_state,
    semigroup_check,
    theta_robustness,
)
from .stages import StageRecord, StageSorter
from .trajectories import (
    crossing_check,
    equivariance_distance,
    integrate,
    sample_initial,
)
from .types import QuantumPotentialForm, StageStatus, StateKind, UnitSystem
from .utils import checksum, fmt_optional, fmt_timedelta


log = logging.getLogger(__name__)


REPORT_NAME = "report.txt"

STAGES: Tuple[str, ...] = (
    "evolve",
    "decompose",
    "diagnostics",
    "trajectories",
    "interference",
    "propagator",
    "constants",
)


class MultiError(Exception):
    def __init__(self, errors: Sequence[Exception]):
        self.errors = errors

    def __str__(self) -> str:
        return "\n".join(str(error) for error in self.errors)


@dataclass(frozen=True)
class AssertionOutcome:
    name: str
    value: float
    limit: float
    passed: bool

    def __str__(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict} {self.name}: {self.value:.6g} (limit {self.limit:.6g})"


class AssertionsFailedError(Exception):
    def __init__(self, failed: Sequence[AssertionOutcome]):
        super().__init__(failed)
        self.failed = failed

    def __str__(self) -> str:
        lines = [f"{len(self.failed)} assertion(s) failed"]
        lines.extend(f"  {outcome}" for outcome in self.failed)
        return "\n".join(lines)


@dataclass(frozen=True)
class FileRecord:
    path: Path  # relative to the output directory
    sha256: str
    size: int


@dataclass(frozen=True)
class ResidualRecord:
    name: str
    time: float
    summary: float


@dataclass
class RunReport:
    config: ExperimentConfig
    output_dir: Path
    stages: Dict[str, StageRecord]
    files: List[FileRecord] = field(default_factory=list)
    residuals: List[ResidualRecord] = field(default_factory=list)
    assertions: List[AssertionOutcome] = field(default_factory=list)
    report_path: Optional[Path] = None

    @property
    def errors(self) -> List[BaseException]:
        return [s.error for s in self.stages.values() if s.error is not None]

    @property
    def failed_assertions(self) -> List[AssertionOutcome]:
        return [a for a in self.assertions if not a.passed]

    @property
    def ok(self) -> bool:
        return not self.errors and not self.failed_assertions

    def raise_for_status(self) -> None:
        errors = self.errors
        if errors:
            raise MultiError([e for e in errors if isinstance(e, Exception)])
        failed = self.failed_assertions
        if failed:
            raise AssertionsFailedError(failed)


def _graph(config: ExperimentConfig) -> Dict[str, AbstractSet[str]]:
    """Dependencies of every enabled stage."""
    ret: Dict[str, AbstractSet[str]] = {}
    if config.simulates:
        ret["evolve"] = set()
        ret["decompose"] = {"evolve"}
        if config.diagnostics.enabled:
            ret["diagnostics"] = {"decompose"}
        if config.trajectories.enabled:
            ret["trajectories"] = {"evolve"}
    if config.interference.enabled:
        ret["interference"] = (
            {"evolve"} if config.interference.screen_x is not None else set()
        )
    if config.propagator.enabled:
        ret["propagator"] = set()
    if config.units.system == UnitSystem.SI_REPORT:
        ret["constants"] = set()
    return ret


def _closure(
    graph: Dict[str, AbstractSet[str]], wanted: Iterable[str]
) -> Dict[str, AbstractSet[str]]:
    keep = set()
    stack = [name for name in wanted if name in graph]
    while stack:
        name = stack.pop()
        if name in keep:
            continue
        keep.add(name)
        stack.extend(graph[name])
    return {name: deps for name, deps in graph.items() if name in keep}


class _Run:
    def __init__(self, config: ExperimentConfig, output_dir: Path, threads: int):
        self.config = config
        self.out = output_dir
        self.threads = threads
        self.report = RunReport(
            config=config,
            output_dir=output_dir,
            stages={name: StageRecord(name) for name in STAGES},
        )
        self.potential: Optional[Potential] = None
        self.evolution: Optional[Evolution] = None
        self._current: Optional[StageRecord] = None

    # Bookkeeping

    def note(self, text: str) -> None:
        assert self._current is not None
        self._current.notes.append(text)
        log.info("%s: %s", self._current.name, text)

    def check(self, name: str, value: float, limit: Optional[float]) -> None:
        if limit is None:
            return
        passed = bool(value <= limit) and not math.isnan(value)
        outcome = AssertionOutcome(name, float(value), float(limit), passed)
        self.report.assertions.append(outcome)
        if not passed:
            log.warning("%s", outcome)

    def add_file(self, path: Path) -> None:
        self.report.files.append(
            FileRecord(path.relative_to(self.out), checksum(path), path.stat().st_size)
        )

    @property
    def history(self) -> Evolution:
        assert self.evolution is not None
        return self.evolution

    def _decompose(self, index: int) -> BohmFields:
        diag = self.config.diagnostics
        return decompose(
            self.history[index],
            backend=diag.backend,
            rel_floor=diag.rho_floor,
            reference_point=diag.reference_point,
        )

    def _residual_index(self) -> int:
        index = self.config.diagnostics.residual_index
        if index is None:
            index = len(self.history) // 2
        return index

    # Stages

    def stage_evolve(self) -> None:
        cfg = self.config
        assert cfg.grid and cfg.initial and cfg.potential and cfg.evolution
        grid = cfg.grid.build()
        initial = cfg.initial.build(grid, cfg.units, cfg.base_dir)
        self.potential = build_potential(grid, cfg.potential.spec(), cfg.units.mass)
        self.evolution = evolve(initial, self.potential, cfg.evolution.plan())
        self.note(
            f"{cfg.evolution.steps} steps of dt={cfg.evolution.dt:.6g} on "
            f"{grid.points} points, {len(self.evolution)} snapshots"
        )
        self.note(f"norm drift {self.evolution.norm_drift:.3g}")
        if not self.evolution.advisory_ok:
            self.note("time step exceeds the advisory limit")
        self.check(
            "max_norm_drift", self.evolution.norm_drift, cfg.assertions.max_norm_drift
        )
        if cfg.output.snapshots:
            snapshots = self.evolution.snapshots
            for path in write_snapshots(self.out / "snapshots", snapshots):
                self.add_file(path)
        if cfg.output.field_csv:
            final = self.evolution[-1]
            self.add_file(write_field_csv(self.out / "field-final.csv", final))

    def stage_decompose(self) -> None:
        cfg = self.config
        potential = self.potential
        assert potential is not None
        series = self.history
        indices = sorted({0, len(series) // 2, len(series) - 1})
        floor = cfg.assertions.assessment_floor
        rho_floor = cfg.diagnostics.rho_floor
        disagreement = 0.0
        identity = 0.0
        worst_spread = 0.0
        last: Optional[BohmFields] = None
        for index in indices:
            snap = series[index]
            bohm = self._decompose(index)
            last = bohm
            keep = density_mask(bohm.rho, floor)
            curv = quantum_potential(
                snap, QuantumPotentialForm.CURVATURE, bohm.backend, rho_floor
            )
            entr = quantum_potential(
                snap, QuantumPotentialForm.ENTROPY, bohm.backend, rho_floor
            )
            scale = max(float(np.max(np.abs(curv[keep]))), 1e-300)
            gap = float(np.max(np.abs(curv - entr)[keep])) / scale
            disagreement = max(disagreement, gap)
            identity = max(identity, gradient_square_identity(bohm))
            total = (potential.values + bohm.Q)[keep]
            spread = float(np.ptp(total))
            worst_spread = max(worst_spread, spread)
            rec = reconstruct(bohm)
            self.note(
                f"t={snap.time:.6g}: reconstruction fidelity {rec.fidelity:.12g}, "
                f"U+Q mean {float(np.mean(total)):.10g} spread {spread:.3g}"
            )
            action = bohm.J
            if action is not None and action.multivalued:
                turns = action.closure_defect / (2 * math.pi * bohm.hbar)
                self.note(
                    f"t={snap.time:.6g}: action is multivalued, "
                    f"{len(action.vortex_cells)} vortex cell(s), "
                    f"closure defect {turns:.6g} x 2 pi hbar"
                )
        self.note(f"quantum potential forms disagree by {disagreement:.3g} (relative)")
        self.note(f"complexified gradient identity defect {identity:.3g}")
        asserts = cfg.assertions
        self.check(
            "max_form_disagreement", disagreement, asserts.max_form_disagreement
        )
        self.check("max_gradient_identity", identity, asserts.max_gradient_identity)
        self.check(
            "uniform_energy_tolerance", worst_spread, asserts.uniform_energy_tolerance
        )
        if cfg.diagnostics.export_fields and last is not None:
            self.add_file(write_bohm_csv(self.out / "bohm-final.csv", last))

    def stage_diagnostics(self) -> None:
        cfg = self.config
        diag = cfg.diagnostics
        asserts = cfg.assertions
        potential = self.potential
        assert potential is not None
        series = self.history.snapshots
        s = cfg.units.reverse_velocity
        backend = diag.backend
        rho_floor = diag.rho_floor
        index = self._residual_index()
        if diag.residuals:
            hj = hj_residual(
                series, potential, index, backend=backend, rel_floor=rho_floor
            )
            cont = continuity_residual(
                series, index, backend=backend, rel_floor=rho_floor
            )
            ent = entropy_balance_residual(
                series, index, backend=backend, rel_floor=rho_floor
            )
            for res in (hj, cont, ent):
                self.report.residuals.append(
                    ResidualRecord(res.name, res.time, res.summary)
                )
            self.check("max_hj_residual", hj.summary, asserts.max_hj_residual)
            self.check(
                "max_continuity_residual", cont.summary, asserts.max_continuity_residual
            )
            self.check(
                "max_entropy_residual", ent.summary, asserts.max_entropy_residual
            )
        if diag.complexified:
            cres = complexified_hj_residual(
                series, potential, index, s, backend=backend, rel_floor=rho_floor
            )
            self.report.residuals.append(
                ResidualRecord("complexified-real", cres.time, cres.real_summary)
            )
            self.report.residuals.append(
                ResidualRecord("complexified-imag", cres.time, cres.imag_summary)
            )
            eps = epsilon_dot_check(
                series, index, s, backend=backend, rel_floor=rho_floor
            )
            magnitude = eps.magnitude[eps.mask]
            rate = float(magnitude.max()) if magnitude.size else 0.0
            self.note(f"direction rate |n'| max {rate:.6g}, drift {eps.drift:.6g}")
            leg = legendre_identities(self._decompose(index), potential, s)
            self.note(
                f"Legendre defects: lagrangian {leg.lagrangian_defect:.3g}, "
                f"velocity {leg.velocity_defect:.3g}"
            )
        if diag.probes:
            bohm = self._decompose(len(series) // 2)
            for probe in (
                taylor_probe_b1(bohm, potential, s),
                taylor_probe_b2(bohm, potential, s),
            ):
                self.note(
                    f"probe {probe.name}: max discrepancy "
                    f"{probe.max_discrepancy:.6g}, correlation "
                    f"{fmt_optional(probe.correlation, '.4f')}"
                )
        if diag.energy:
            for index in (0, len(series) - 1):
                budget = energy_budget(
                    series[index], potential, diag.backend, diag.rho_floor
                )
                self.note(
                    f"t={series[index].time:.6g}: <H>={budget.hamiltonian:.10g} "
                    f"flow {budget.flow_kinetic:.6g} potential {budget.potential:.6g} "
                    f"quantum {budget.quantum:.6g} defect {budget.defect:.3g}"
                )
        turns = asserts.circulation_turns
        for i, loop in enumerate(diag.circulation_loops):
            expected = turns[i] if turns is not None and i < len(turns) else None
            worst = 0.0
            for snap in (series[0], series[-1]):
                circ = circulation(snap, loop, diag.rho_floor)
                self.note(
                    f"loop {i} at t={snap.time:.6g}: circulation "
                    f"{circ.turns:.9f} x 2 pi hbar"
                )
                if expected is not None:
                    worst = max(worst, abs(circ.turns - expected))
            if expected is not None:
                self.check(
                    f"circulation_loop_{i}", worst, asserts.circulation_tolerance
                )

    def stage_trajectories(self) -> None:
        cfg = self.config
        traj = cfg.trajectories
        series = self.history.snapshots
        start = sample_initial(series[0], traj.particles, traj.seed)
        ensemble = integrate(
            series,
            start,
            seed=traj.seed,
            threads=self.threads,
            backend=cfg.diagnostics.backend,
        )
        counts = {flag.value: 0 for flag in set(ensemble.flags)}
        for flag in ensemble.flags:
            counts[flag.value] += 1
        self.note(
            f"{ensemble.count} particles: "
            + ", ".join(f"{n} {name}" for name, n in sorted(counts.items()))
        )
        if ensemble.dims == 1:
            crossings = crossing_check(ensemble)
            self.note(f"{len(crossings.violations)} crossing(s)")
            self.check(
                "max_crossings",
                len(crossings.violations),
                cfg.assertions.max_crossings,
            )
        tv = equivariance_distance(ensemble, series[-1], traj.bins)
        self.note(f"equivariance TV distance {tv:.4g}")
        self.check("max_tv_distance", tv, cfg.assertions.max_tv_distance)
        self.add_file(write_trajectories_csv(self.out / "trajectories.csv", ensemble))

    def _geometry(self) -> FringeGeometry:
        cfg = self.config
        assert cfg.potential is not None and cfg.initial is not None
        screen_x = cfg.interference.screen_x
        assert screen_x is not None
        spec = cfg.potential.spec()
        if isinstance(spec, TwoSlitBarrier):
            k = cfg.initial.wavevector[0]
            return FringeGeometry.from_barrier(spec, screen_x, k)
        if cfg.initial.state == StateKind.GAUSSIAN_PAIR:
            assert cfg.initial.centers is not None
            (_, y1), (_, y2) = cfg.initial.centers
            series = self.history
            return FringeGeometry.from_flight_time(
                abs(y2 - y1),
                series[-1].time - series[0].time,
                cfg.units.hbar,
                cfg.units.mass,
            )
        raise ValueError(
            "a screen comparison needs a two-slit barrier or a Gaussian pair"
        )

    def stage_interference(self) -> None:
        inter = self.config.interference
        model = SlitModel(inter.x1, inter.x2, inter.sigma, inter.k)
        xs = np.linspace(inter.x_range[0], inter.x_range[1], inter.points)
        rows = pattern_table(model, xs)
        self.add_file(write_pattern_csv(self.out / "pattern.csv", rows))
        center = float(pattern(model, np.array(0.0)))
        integral = pattern_integral(model)
        self.note(f"analytic pattern: P(0)={center:.6g}, integral {integral:.9g}")
        if inter.screen_x is None:
            return
        geometry = self._geometry()
        fringes = compare_simulated(
            self.history[-1], inter.screen_x, geometry, inter.midline_y, inter.fit
        )
        measured = fmt_optional(fringes.measured_spacing, ".6g")
        self.note(
            f"fringe spacing {measured}, predicted "
            f"{fringes.predicted_spacing:.6g}, "
            f"central offset {fringes.central_offset:.3g}"
        )
        if fringes.fit is not None:
            self.note(f"fitted contrast {fringes.fit.contrast:.4f}")
        self.check(
            "max_fringe_spacing_error",
            fringes.spacing_error,
            self.config.assertions.max_fringe_spacing_error,
        )
        self.add_file(
            write_profile_csv(self.out / "screen.csv", fringes.y, fringes.profile)
        )

    def stage_propagator(self) -> None:
        cfg = self.config
        prop = cfg.propagator
        hbar, mass = cfg.units.hbar, cfg.units.mass
        spec = prop.spec()
        rows = convergence_study(
            spec,
            prop.x_start,
            prop.x_end,
            prop.total_time,
            list(prop.slices),
            theta=prop.theta,
            rule=prop.rule,
            hbar=hbar,
            mass=mass,
        )
        for row in rows:
            self.note(
                f"M={row.slices}: relative error {row.error:.4g}, "
                f"order {fmt_optional(row.order, '.3f')}"
            )
        self.check(
            "max_propagator_error", rows[-1].error, cfg.assertions.max_propagator_error
        )
        self.add_file(write_convergence_csv(self.out / "propagator.csv", rows))
        if prop.t_mid is not None:
            lattice = LatticeSpec(
                prop.slices[-1], prop.total_time, prop.theta, prop.rule, hbar, mass
            )
            report = semigroup_check(
                lattice, spec, prop.x_start, prop.x_end, prop.t_mid
            )
            self.note(f"semigroup defect {report.defect:.3g}")
            self.check(
                "max_semigroup_defect",
                report.defect,
                cfg.assertions.max_semigroup_defect,
            )
        robustness = theta_robustness(
            spec,
            prop.x_start,
            prop.x_end,
            prop.total_time,
            prop.slices[-1],
            rule=prop.rule,
            hbar=hbar,
            mass=mass,
        )
        self.note(
            f"M={robustness.slices}: relative errors "
            + ", ".join(f"{e:.4g} at theta={t:g}" for t, e in robustness.errors)
        )
        self.check(
            "max_theta_spread", robustness.spread, cfg.assertions.max_theta_spread
        )
        if cfg.grid is not None and cfg.initial is not None and cfg.grid.dims == 1:
            self._lattice_state()

    def _lattice_state(self) -> None:
        """Apply the real-time lattice to the initial state and compare with evolve."""
        cfg = self.config
        prop = cfg.propagator
        assert cfg.grid and cfg.initial
        grid = cfg.grid.build()
        initial = cfg.initial.build(grid, cfg.units, cfg.base_dir)
        potential = build_potential(grid, prop.spec(), cfg.units.mass)
        lattice = LatticeSpec(
            prop.slices[-1],
            prop.total_time,
            0.0,
            prop.rule,
            cfg.units.hbar,
            cfg.units.mass,
        )
        moved = propagate_state(initial, potential, lattice)
        reference = evolve(
            initial, potential, EvolutionPlan(lattice.delta_t, lattice.slices)
        )[-1]
        drift = abs(norm(moved) - norm(initial))
        error = math.sqrt(
            float(grid.integrate(np.abs(moved.amplitude - reference.amplitude) ** 2))
        )
        self.note(
            f"lattice state at t={moved.time:.6g}: norm drift {drift:.3g}, "
            f"L2 distance to the split-operator state {error:.3g}"
        )
        asserts = cfg.assertions
        self.check("max_lattice_norm_drift", drift, asserts.max_lattice_norm_drift)
        self.check("max_lattice_state_error", error, asserts.max_lattice_state_error)

    def stage_constants(self) -> None:
        uc = universal_constants()
        self.note(f"s = {uc.s:.6e} s/m")
        self.note(f"s*c = {uc.s_times_c:.6f} (inverse fine-structure constant)")
        masses = dict(PARTICLE_MASSES)
        # in an SI report the configured mass is in kg
        mass = self.config.units.mass
        if mass not in masses.values():
            masses[f"configured {mass:g} kg"] = mass
        rows = radius_table(masses=masses)
        for row in rows:
            self.note(f"{row.name}: epsilon radius {row.radius:.4e} m")
        self.add_file(
            write_csv(
                self.out / "constants.csv",
                ["name", "mass_kg", "radius_m", "planck_ratio"],
                ([r.name, r.mass, r.radius, r.planck_ratio] for r in rows),
            )
        )

    # Driver

    def execute(self, stages: Optional[AbstractSet[str]]) -> RunReport:
        graph = _graph(self.config)
        if stages is not None:
            unknown = set(stages) - set(STAGES)
            if unknown:
                raise ValueError(f"unknown stage(s) {sorted(unknown)}")
            graph = _closure(graph, stages)
        for name, record in self.report.stages.items():
            if name not in graph:
                record.status = StageStatus.DISABLED
        sorter = StageSorter(graph)
        handlers: Dict[str, Callable[[], None]] = {
            name: getattr(self, f"stage_{name}") for name in STAGES
        }
        self.out.mkdir(parents=True, exist_ok=True)
        while not sorter.is_all_finished():
            for name in sorter.get_ready():
                record = self.report.stages[name]
                blocked = sorter.blocked_by(name)
                if blocked:
                    record.status = StageStatus.SKIPPED
                    names = ", ".join(blocked)
                    record.notes.append(f"skipped, {names} did not succeed")
                    log.warning("Skipping %s: %s did not succeed", name, blocked)
                    sorter.mark(name, record.status)
                    continue
                self._run_stage(record, handlers[name])
                sorter.mark(name, record.status)
        self.report.report_path = write_report(self.report)
        return self.report

    def _run_stage(self, record: StageRecord, handler: Callable[[], None]) -> None:
        record.status = StageStatus.RUNNING
        record.started = datetime.datetime.now(datetime.timezone.utc)
        self._current = record
        log.info("Stage %s started", record.name)
        try:
            handler()
        except Exception as exc:
            record.status = StageStatus.FAILED
            record.error = exc
            log.error("Stage %s failed: %s", record.name, exc)
            log.debug("Stage %s traceback", record.name, exc_info=True)
        else:
            record.status = StageStatus.SUCCEEDED
        finally:
            record.finished = datetime.datetime.now(datetime.timezone.utc)
            self._current = None


def run(
    config: ExperimentConfig,
    output_dir: Optional[Path] = None,
    *,
    threads: int = 1,
    stages: Optional[AbstractSet[str]] = None,
) -> RunReport:
    """Execute the enabled stages and write report.txt.

    ``stages`` restricts the run to the named stages and their dependencies.
    Stage failures and assertion outcomes are collected in the returned
    report; ``RunReport.raise_for_status`` turns them into exceptions.
    """
    if output_dir is None:
        output_dir = Path(config.output.directory)
        if config.base_dir is not None and not output_dir.is_absolute():
            output_dir = config.base_dir / output_dir
    with scipy.fft.set_workers(max(1, threads)):
        return _Run(config, output_dir, max(1, threads)).execute(stages)


# #### Report ####


def _report_lines(report: RunReport) -> List[str]:
    cfg = report.config
    lines = [f"bohm-lab {bohm_lab.__version__} run report", ""]
    if cfg.grid is not None and cfg.evolution is not None:
        grid = cfg.grid.build()
        lines.append(
            f"grid: dims={grid.dims} points={grid.points} "
            f"spacing=({', '.join(format(h, '.6g') for h in grid.spacing)})"
        )
        lines.append(
            f"evolution: dt={cfg.evolution.dt:.6g} steps={cfg.evolution.steps} "
            f"stride={cfg.evolution.snapshot_stride}"
        )
        lines.append(
            f"units: hbar={cfg.units.hbar:.6g} mass={cfg.units.mass:.6g} "
            f"s={cfg.units.reverse_velocity:.6g}"
        )
        lines.append("")
    lines.append("[stages]")
    for record in report.stages.values():
        duration = record.duration
        took = fmt_timedelta(duration) if duration is not None else "-"
        lines.append(f"{record.name:<14}{record.status.value:<11}{took}")
        for note in record.notes:
            lines.append(f"    {note}")
        if record.error is not None:
            lines.append(f"    error: {record.error}")
    lines.append("")
    lines.append("[residuals]")
    for res in report.residuals:
        lines.append(f"{res.name:<20}t={res.time:<12.6g}L2={res.summary:.6e}")
    lines.append("")
    lines.append("[assertions]")
    for outcome in report.assertions:
        lines.append(str(outcome))
    lines.append("")
    lines.append("[files]")
    for rec in sorted(report.files, key=lambda r: str(r.path)):
        lines.append(f"{rec.sha256}  {rec.size:>12}  {rec.path.as_posix()}")
    return lines


def write_report(report: RunReport) -> Path:
    path = report.output_dir / REPORT_NAME
    path.write_text("\n".join(_report_lines(report)) + "\n")
    log.info("Report written to %s", path)
    return path
