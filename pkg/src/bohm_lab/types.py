import enum
import numpy as np
import numpy.typing as npt
from pathlib import Path
from typing import List, Tuple


LocalPath = Path

RealArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]
BoolArray = npt.NDArray[np.bool_]
Point = Tuple[float, ...]


class DerivativeBackend(str, enum.Enum):
    SPECTRAL = "spectral"
    FD2 = "fd2"


class QuantumPotentialForm(str, enum.Enum):
    CURVATURE = "curvature"
    ENTROPY = "entropy"


class PotentialRule(str, enum.Enum):
    # Where the potential of a lattice slice is sampled
    ENDPOINT = "endpoint"
    SYMMETRIC = "symmetric"


class UnitSystem(str, enum.Enum):
    NATURAL = "natural"
    SI_REPORT = "si-report"


class StateKind(str, enum.Enum):
    GAUSSIAN = "gaussian"
    FREE_GAUSSIAN = "free_gaussian"
    PLANE_WAVE = "plane_wave"
    HARMONIC = "harmonic"
    VORTEX = "vortex"
    GAUSSIAN_PAIR = "gaussian_pair"
    FILE = "file"


class PropagatorSystem(str, enum.Enum):
    FREE = "free"
    HARMONIC = "harmonic"


class ParticleFlag(str, enum.Enum):
    ACTIVE = "active"
    FROZEN = "frozen"  # entered a node-masked region
    EXITED = "exited"  # left the grid


class StageStatus(str, enum.Enum):
    def __rich__(self) -> str:
        return f"[{COLORS[self]}]{self.value}"

    PENDING = "pending"
    RUNNING = "running"
    SUCCEEDED = "succeeded"
    FAILED = "failed"
    SKIPPED = "skipped"
    DISABLED = "disabled"

    @property
    def is_finished(self) -> bool:
        return self in (
            self.SUCCEEDED,
            self.FAILED,
            self.SKIPPED,
            self.DISABLED,
        )

    @classmethod
    def values(cls) -> List[str]:
        return [item.value for item in cls]


COLORS = {
    StageStatus.PENDING: "cyan",
    StageStatus.RUNNING: "blue",
    StageStatus.SUCCEEDED: "green",
    StageStatus.FAILED: "red",
    StageStatus.SKIPPED: "bright_black",
    StageStatus.DISABLED: "magenta",
}
