# SI constants for the complexified mechanics.
#
# The reverse velocity s = 4 pi eps0 hbar / e^2 sets the radius s hbar / 2m
# of the imaginary part of the complexified coordinate.

from dataclasses import dataclass, replace

import logging
import math
import scipy.constants as const
from typing import Dict, List, Mapping, Optional


log = logging.getLogger(__name__)


FINE_STRUCTURE = const.fine_structure

PLANCK_LENGTH = math.sqrt(const.hbar * const.G / const.c**3)

PARTICLE_MASSES: Dict[str, float] = {
    "electron": const.m_e,
    "muon": const.physical_constants["muon mass"][0],
    "proton": const.m_p,
    "neutron": const.m_n,
    "microgram": 1e-9,
    "milligram": 1e-6,
}


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA values in SI units; any of them may be overridden."""

    hbar: float = const.hbar
    mass: float = const.m_e
    elementary_charge: float = const.e
    vacuum_permittivity: float = const.epsilon_0
    speed_of_light: float = const.c

    def __post_init__(self) -> None:
        for name in (
            "hbar",
            "mass",
            "elementary_charge",
            "vacuum_permittivity",
            "speed_of_light",
        ):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value}")

    def with_mass(self, mass: float) -> "PhysicalConstants":
        return replace(self, mass=mass)


CODATA = PhysicalConstants()


def reverse_velocity_constant(constants: PhysicalConstants = CODATA) -> float:
    """s = 4 pi eps0 hbar / e^2, in s/m."""
    return (
        4
        * math.pi
        * constants.vacuum_permittivity
        * constants.hbar
        / constants.elementary_charge**2
    )


def epsilon_radius(
    constants: PhysicalConstants = CODATA, mass: Optional[float] = None
) -> float:
    """s hbar / 2m, in metres."""
    if mass is None:
        mass = constants.mass
    if not mass > 0:
        raise ValueError(f"mass must be positive, got {mass}")
    return reverse_velocity_constant(constants) * constants.hbar / (2 * mass)


@dataclass(frozen=True)
class UniversalConstants:
    s: float
    speed_of_light: float
    hbar: float

    @property
    def s_times_c(self) -> float:
        """Equals the inverse fine-structure constant, not its reciprocal."""
        return self.s * self.speed_of_light

    @property
    def alpha_defect(self) -> float:
        return abs(self.s_times_c * FINE_STRUCTURE - 1)

    def epsilon_radius(self, mass: float) -> float:
        if not mass > 0:
            raise ValueError(f"mass must be positive, got {mass}")
        return self.s * self.hbar / (2 * mass)


def universal_constants(constants: PhysicalConstants = CODATA) -> UniversalConstants:
    ret = UniversalConstants(
        s=reverse_velocity_constant(constants),
        speed_of_light=constants.speed_of_light,
        hbar=constants.hbar,
    )
    log.debug("s=%.6g s/m, s*c=%.6g", ret.s, ret.s_times_c)
    return ret


@dataclass(frozen=True)
class RadiusRow:
    name: str
    mass: float
    radius: float

    @property
    def planck_ratio(self) -> float:
        return self.radius / PLANCK_LENGTH


def radius_table(
    constants: PhysicalConstants = CODATA,
    masses: Optional[Mapping[str, float]] = None,
) -> List[RadiusRow]:
    if masses is None:
        masses = PARTICLE_MASSES
    return [
        RadiusRow(name, mass, epsilon_radius(constants, mass))
        for name, mass in masses.items()
    ]
