import click
import math
import numpy as np
from pathlib import Path
from rich import box
from rich.table import Table
from typing import Any, Callable, Sequence, Tuple

from ..config import PropagatorConfig
from ..constants import PARTICLE_MASSES, radius_table, universal_constants
from ..field_io import write_convergence_csv, write_pattern_csv
from ..interference import SlitModel, pattern, pattern_integral, pattern_table
from ..propagator import MAX_THETA, convergence_study
from ..types import PotentialRule, PropagatorSystem
from ..utils import fmt_optional
from .root import Root


def _file_option(default: str) -> Callable[..., Any]:
    return click.option(
        "-o",
        "--output",
        type=click.Path(dir_okay=False, writable=True, path_type=Path),
        default=Path(default),
        show_default=True,
        metavar="FILE",
        help="CSV file to write.",
    )


@click.command()
@click.option(
    "--x1", type=float, default=0.5, show_default=True, help="First path center."
)
@click.option(
    "--x2", type=float, default=-0.5, show_default=True, help="Second path center."
)
@click.option(
    "--sigma", type=float, default=1.0, show_default=True, help="Path width."
)
@click.option(
    "--k", type=float, default=2.0, show_default=True, help="Fringe wavenumber."
)
@click.option(
    "--range",
    "x_range",
    type=(float, float),
    default=(-6.0, 6.0),
    show_default=True,
    help="Interval of the screen coordinate.",
)
@click.option(
    "--points", type=click.IntRange(min=2), default=241, show_default=True
)
@_file_option("pattern.csv")
@click.pass_obj
def interfere(
    root: Root,
    x1: float,
    x2: float,
    sigma: float,
    k: float,
    x_range: Tuple[float, float],
    points: int,
    output: Path,
) -> None:
    """Tabulate the analytic two-path interference pattern.

    Columns: x, P, midline, rho1, rho2.
    """
    if not x_range[1] > x_range[0]:
        raise click.BadParameter(
            "the upper end must exceed the lower one", param_hint="--range"
        )
    try:
        model = SlitModel(x1, x2, sigma, k)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    xs = np.linspace(x_range[0], x_range[1], points)
    write_pattern_csv(output, pattern_table(model, xs))
    center = float(pattern(model, np.array(0.0)))
    root.console.print(f"P(0) = {center:.6g}, integral {pattern_integral(model):.9g}")
    root.console.print(f"{points} rows written to [b]{output}[/b]")


@click.command()
@click.option(
    "--system",
    type=click.Choice([s.value for s in PropagatorSystem]),
    default=PropagatorSystem.HARMONIC.value,
    show_default=True,
)
@click.option("--omega", type=float, default=1.0, show_default=True)
@click.option(
    "--M",
    "slices",
    type=click.IntRange(min=1),
    multiple=True,
    default=(8, 16, 32, 64),
    show_default=True,
    help="Slice count, multiple values allowed.",
)
@click.option(
    "--theta",
    type=click.FloatRange(0.0, MAX_THETA),
    default=0.02,
    show_default=True,
    help="Wick rotation angle of the time step.",
)
@click.option(
    "--T",
    "total_time",
    type=float,
    default=math.pi / 2,
    show_default=True,
    help="Propagation time.",
)
@click.option("--x-start", type=float, default=0.0, show_default=True)
@click.option("--x-end", type=float, default=1.0, show_default=True)
@click.option(
    "--rule",
    type=click.Choice([r.value for r in PotentialRule]),
    default=PotentialRule.ENDPOINT.value,
    show_default=True,
)
@_file_option("propagator.csv")
@click.pass_obj
def propagator(
    root: Root,
    system: str,
    omega: float,
    slices: Sequence[int],
    theta: float,
    total_time: float,
    x_start: float,
    x_end: float,
    rule: str,
    output: Path,
) -> None:
    """Converge the lattice path integral towards the exact kernel.

    Columns: M, error, order.
    """
    counts = sorted(set(slices))
    if not total_time > 0:
        raise click.BadParameter("must be positive", param_hint="--T")
    cfg = PropagatorConfig(
        enabled=True,
        system=PropagatorSystem(system),
        omega=omega,
        slices=tuple(counts),
        theta=theta,
        total_time=total_time,
        x_start=x_start,
        x_end=x_end,
        rule=PotentialRule(rule),
    )
    rows = convergence_study(
        cfg.spec(),
        x_start,
        x_end,
        total_time,
        counts,
        theta=theta,
        rule=cfg.rule,
    )
    table = Table(box=box.MINIMAL_HEAVY_HEAD)
    table.add_column("M", justify="right", style="bold")
    table.add_column("ERROR", justify="right")
    table.add_column("ORDER", justify="right")
    for row in rows:
        table.add_row(
            str(row.slices), f"{row.error:.4e}", fmt_optional(row.order, ".3f")
        )
    root.console.print(table)
    write_convergence_csv(output, rows)
    root.console.print(f"{len(rows)} rows written to [b]{output}[/b]")


@click.command()
@click.option(
    "--mass",
    type=click.FloatRange(min=0.0, min_open=True),
    multiple=True,
    metavar="KG",
    help="Extra particle mass for the radius table, multiple values allowed.",
)
@click.pass_obj
def constants(root: Root, mass: Sequence[float]) -> None:
    """Print the reverse velocity and the imaginary broadening radii."""
    uc = universal_constants()
    root.console.print(f"s       = {uc.s:.6e} s/m")
    root.console.print(f"s*c     = {uc.s_times_c:.9f}")
    root.console.print(f"|s*c*alpha - 1| = {uc.alpha_defect:.3e}")
    masses = dict(PARTICLE_MASSES)
    for value in mass:
        masses[f"{value:g} kg"] = value
    table = Table(box=box.MINIMAL_HEAVY_HEAD)
    table.add_column("PARTICLE", style="bold")
    table.add_column("MASS, KG", justify="right")
    table.add_column("RADIUS, M", justify="right")
    table.add_column("/ PLANCK LENGTH", justify="right")
    for row in radius_table(masses=masses):
        table.add_row(
            row.name, f"{row.mass:.6e}", f"{row.radius:.6e}", f"{row.planck_ratio:.4g}"
        )
    root.console.print(table)
