import click
import dataclasses
from pathlib import Path
from typing import Optional

from ..config import ExperimentConfig, emit_config, load_config
from ..parser import ConfigError
from .root import Root
from .utils import config_argument, execute, output_option


def _simulation(path: Path) -> ExperimentConfig:
    config = load_config(path)
    if not config.simulates:
        raise click.ClickException(f"{path} has no grid to simulate on")
    return config


@click.command()
@config_argument()
@output_option()
@click.pass_obj
def evolve(root: Root, config: Path, output: Optional[Path]) -> None:
    """Evolve the initial state of CONFIG.

    Writes the snapshot series and the final field.
    """
    execute(root, _simulation(config), output, {"evolve"})


@click.command()
@config_argument()
@click.option(
    "--particles",
    type=click.IntRange(min=1),
    default=None,
    metavar="N",
    help="Number of particles, overrides trajectories.particles.",
)
@click.option(
    "--seed",
    type=int,
    default=None,
    metavar="S",
    help="Sampling seed, overrides trajectories.seed.",
)
@output_option()
@click.pass_obj
def trajectories(
    root: Root,
    config: Path,
    particles: Optional[int],
    seed: Optional[int],
    output: Optional[Path],
) -> None:
    """Integrate Bohmian trajectories through the evolution of CONFIG."""
    cfg = _simulation(config)
    assert cfg.evolution is not None
    if cfg.evolution.backward:
        raise ConfigError("trajectories need a forward evolution", "backward", None)
    traj = dataclasses.replace(cfg.trajectories, enabled=True)
    if particles is not None:
        traj = dataclasses.replace(traj, particles=particles)
    if seed is not None:
        traj = dataclasses.replace(traj, seed=seed)
    cfg = dataclasses.replace(cfg, trajectories=traj)
    execute(root, cfg, output, {"trajectories"})


@click.command()
@config_argument()
@output_option()
@click.pass_obj
def diagnostics(root: Root, config: Path, output: Optional[Path]) -> None:
    """Decompose the evolution of CONFIG and evaluate the diagnostics.

    Reports the residuals, the quantum potential checks, the energy budget
    and the circulation of the configured loops.
    """
    cfg = _simulation(config)
    cfg = dataclasses.replace(
        cfg, diagnostics=dataclasses.replace(cfg.diagnostics, enabled=True)
    )
    execute(root, cfg, output, {"decompose", "diagnostics"})


@click.command()
@config_argument()
@output_option()
@click.pass_obj
def run(root: Root, config: Path, output: Optional[Path]) -> None:
    """Run every enabled stage of CONFIG and write the run report.

    Exits with code 2 when a stage fails or an assertion does not hold.
    """
    execute(root, load_config(config), output)


@click.command("show-config")
@config_argument()
@click.pass_obj
def show_config(root: Root, config: Path) -> None:
    """Print the effective CONFIG with every default spelled out."""
    root.console.print(
        emit_config(load_config(config)),
        markup=False,
        highlight=False,
        soft_wrap=True,
        end="",
    )
