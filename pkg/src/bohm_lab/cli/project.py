import click
from pathlib import Path
from typing import Dict, List, Optional

import bohm_lab

from .root import Root


PRESETS_DIR = Path(bohm_lab.__file__).parent / "presets"


def presets() -> Dict[str, Path]:
    return {path.stem: path for path in sorted(PRESETS_DIR.glob("*.yml"))}


def preset_names() -> List[str]:
    return sorted(presets())


@click.command()
@click.argument(
    "preset",
    type=click.Choice(preset_names()),
    default="free-gaussian",
)
@click.option(
    "-o",
    "--output",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    metavar="FILE",
    help="Where to write the config, PRESET.yml in the working directory by default.",
)
@click.option("--force", is_flag=True, help="Overwrite an existing file.")
@click.pass_obj
def init(root: Root, preset: str, output: Optional[Path], force: bool) -> None:
    """Write a reference experiment config.

    The config runs as is with `bohm-lab run`.
    """
    if output is None:
        output = Path.cwd() / f"{preset}.yml"
    if output.exists() and not force:
        raise click.ClickException(
            f"{output} already exists, use --force to replace it"
        )
    output.write_text(presets()[preset].read_text())
    root.console.print(f"Preset [b]{preset}[/b] written to [b]{output}[/b]")
