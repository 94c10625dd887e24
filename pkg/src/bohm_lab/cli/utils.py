import click
from pathlib import Path
from rich import box
from rich.console import Console
from rich.table import Table
from typing import AbstractSet, Any, Callable, Optional

from ..config import ExperimentConfig
from ..runner import RunReport, run
from ..types import StageStatus
from ..utils import fmt_size, fmt_status, fmt_timedelta
from .root import Root


def config_argument() -> Callable[..., Any]:
    return click.argument(
        "config",
        type=click.Path(exists=True, dir_okay=False, readable=True, path_type=Path),
    )


def output_option() -> Callable[..., Any]:
    return click.option(
        "-o",
        "--output",
        type=click.Path(file_okay=False, writable=True, path_type=Path),
        default=None,
        metavar="DIR",
        help="Output directory, overrides output.directory of the config.",
    )


def execute(
    root: Root,
    config: ExperimentConfig,
    output: Optional[Path],
    stages: Optional[AbstractSet[str]] = None,
) -> RunReport:
    """Run the stages, print the summary and raise on failures."""
    report = run(config, output, threads=root.threads, stages=stages)
    print_report(root.console, report)
    report.raise_for_status()
    return report


def stage_table(report: RunReport) -> Table:
    table = Table(box=box.MINIMAL_HEAVY_HEAD)
    table.add_column("STAGE", style="bold")
    table.add_column("STATUS")
    table.add_column("TOOK")
    table.add_column("NOTES", overflow="fold")
    for record in report.stages.values():
        if record.status == StageStatus.DISABLED:
            continue
        duration = record.duration
        notes = list(record.notes)
        if record.error is not None:
            notes.append(f"[red]{record.error}")
        table.add_row(
            record.name,
            fmt_status(record.status),
            fmt_timedelta(duration) if duration is not None else "",
            "\n".join(notes),
        )
    return table


def print_report(console: Console, report: RunReport) -> None:
    console.print(stage_table(report))
    if report.residuals:
        table = Table(box=box.MINIMAL_HEAVY_HEAD)
        table.add_column("RESIDUAL", style="bold")
        table.add_column("T", justify="right")
        table.add_column("L2", justify="right")
        for res in report.residuals:
            table.add_row(res.name, f"{res.time:.6g}", f"{res.summary:.3e}")
        console.print(table)
    if report.assertions:
        table = Table(box=box.MINIMAL_HEAVY_HEAD)
        table.add_column("ASSERTION", style="bold")
        table.add_column("VALUE", justify="right")
        table.add_column("LIMIT", justify="right")
        table.add_column("RESULT")
        for outcome in report.assertions:
            table.add_row(
                outcome.name,
                f"{outcome.value:.6g}",
                f"{outcome.limit:.6g}",
                "[green]pass" if outcome.passed else "[red]FAIL",
            )
        console.print(table)
    total = sum(f.size for f in report.files)
    console.print(
        f"{len(report.files)} file(s), {fmt_size(total)} written to "
        f"[b]{report.output_dir}[/b]"
    )
