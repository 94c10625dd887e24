import pytest

from bohm_lab.cli.project import PRESETS_DIR, preset_names, presets
from bohm_lab.config import emit_config, load_config, parse_config
from bohm_lab.potentials import PotentialKind
from bohm_lab.types import StateKind, UnitSystem


def test_preset_names() -> None:
    assert preset_names() == [
        "constants",
        "free-gaussian",
        "harmonic",
        "two-slit",
        "vortex",
    ]


@pytest.mark.parametrize("name", preset_names())
def test_preset_loads(name: str) -> None:
    config = load_config(presets()[name])
    assert config.output.directory == f"{name}-output"
    assert config.base_dir == PRESETS_DIR
    assert parse_config(emit_config(config)) == config


def test_constants_preset_does_not_simulate() -> None:
    config = load_config(PRESETS_DIR / "constants.yml")
    assert not config.simulates
    assert config.units.system == UnitSystem.SI_REPORT


def test_two_slit_preset_uses_a_screen() -> None:
    config = load_config(PRESETS_DIR / "two-slit.yml")
    assert config.potential is not None and config.initial is not None
    assert config.potential.kind == PotentialKind.TWO_SLIT
    assert config.initial.wavevector == (3.0, 0.0)
    assert config.interference.screen_x == 8.0
    assert config.trajectories.enabled


def test_vortex_preset() -> None:
    config = load_config(PRESETS_DIR / "vortex.yml")
    assert config.initial is not None
    assert config.initial.state == StateKind.VORTEX
    assert config.diagnostics.circulation_loops == (((-2.0, -2.0), (2.0, 2.0)),)
    assert config.assertions.circulation_turns == (1,)


def test_harmonic_preset_splits_on_a_slice() -> None:
    config = load_config(PRESETS_DIR / "harmonic.yml")
    prop = config.propagator
    assert prop.enabled
    assert prop.t_mid is not None
    steps = prop.t_mid / (prop.total_time / prop.slices[-1])
    assert steps == pytest.approx(round(steps))
