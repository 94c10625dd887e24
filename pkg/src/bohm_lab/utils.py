import datetime
import hashlib
import humanize
import math
from pathlib import Path
from typing import Optional

from .types import COLORS, StageStatus


CHUNK_SIZE = 1 << 20


def fmt_float(value: float) -> str:
    """17 significant digits, always read back as a float by YAML."""
    if math.isnan(value):
        return ".nan"
    if math.isinf(value):
        return ".inf" if value > 0 else "-.inf"
    ret = format(value, ".17g")
    if "e" in ret:
        mantissa, exponent = ret.split("e")
        if "." not in mantissa:
            ret = f"{mantissa}.0e{exponent}"
    elif "." not in ret:
        ret += ".0"
    return ret


def fmt_status(status: StageStatus) -> str:
    color = COLORS.get(status, "none")
    return f"[{color}]{status.value}[/{color}]"


def fmt_timedelta(delta: datetime.timedelta) -> str:
    s = delta.total_seconds()
    if s < 0:
        raise ValueError(f"Invalid delta {delta}: expect non-negative total value")
    if s < 60:
        return f"{s:.2f}s"
    return humanize.precisedelta(delta, minimum_unit="seconds", format="%0.0f")


def fmt_size(size: int) -> str:
    return humanize.naturalsize(size, binary=True)


def fmt_optional(value: Optional[float], spec: str = ".3g") -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "N/A"
    return format(value, spec)


def checksum(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as f:
        for chunk in iter(lambda: f.read(CHUNK_SIZE), b""):
            digest.update(chunk)
    return digest.hexdigest()
