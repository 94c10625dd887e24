# Field and table files
#
# BOHM1 binary layout, little-endian throughout:
#   magic "BOHM1", u32 dims, per axis (u64 points, f64 min, f64 max),
#   f64 time, then (re, im) f64 pairs in row-major order.

import csv
import logging
import numpy as np
from pathlib import Path
from typing import Iterable, List, Sequence, Union

from .bohm import BohmFields
from .fields import WaveField
from .grid import Grid
from .interference import PatternRow
from .propagator import ConvergenceRow
from .trajectories import TrajectoryEnsemble
from .utils import fmt_float


log = logging.getLogger(__name__)


MAGIC = b"BOHM1"
SNAPSHOT_PATTERN = "snapshot-{index:05d}.bohm"

_U32 = np.dtype("<u4")
_U64 = np.dtype("<u8")
_F64 = np.dtype("<f8")
_C128 = np.dtype("<c16")


class FieldFormatError(ValueError):
    pass


def _header(field: WaveField) -> bytes:
    grid = field.grid
    parts = [MAGIC, np.array([grid.dims], dtype=_U32).tobytes()]
    for n, lo, hi in zip(grid.points, grid.mins, grid.maxs):
        parts.append(np.array([n], dtype=_U64).tobytes())
        parts.append(np.array([lo, hi], dtype=_F64).tobytes())
    parts.append(np.array([field.time], dtype=_F64).tobytes())
    return b"".join(parts)


def encode_field(field: WaveField) -> bytes:
    body = np.ascontiguousarray(field.amplitude, dtype=_C128).tobytes()
    return _header(field) + body


def decode_field(data: bytes, *, hbar: float = 1.0, mass: float = 1.0) -> WaveField:
    if data[: len(MAGIC)] != MAGIC:
        raise FieldFormatError("not a BOHM1 field file")
    offset = len(MAGIC)

    def take(dtype: np.dtype, count: int) -> np.ndarray:  # type: ignore[type-arg]
        nonlocal offset
        size = dtype.itemsize * count
        if offset + size > len(data):
            raise FieldFormatError("truncated BOHM1 field file")
        ret = np.frombuffer(data, dtype=dtype, count=count, offset=offset)
        offset += size
        return ret

    dims = int(take(_U32, 1)[0])
    if dims not in (1, 2):
        raise FieldFormatError(f"unsupported dimension count {dims}")
    points = []
    mins = []
    maxs = []
    for _ in range(dims):
        points.append(int(take(_U64, 1)[0]))
        lo, hi = take(_F64, 2)
        mins.append(float(lo))
        maxs.append(float(hi))
    time = float(take(_F64, 1)[0])
    grid = Grid(tuple(mins), tuple(maxs), tuple(points))
    amplitude = take(_C128, grid.size).reshape(grid.shape)
    if offset != len(data):
        raise FieldFormatError(f"{len(data) - offset} trailing bytes after the field")
    return WaveField(grid, amplitude.astype(np.complex128), time, hbar, mass)


def write_field(path: Path, field: WaveField) -> Path:
    path.write_bytes(encode_field(field))
    log.debug("Wrote %s", path)
    return path


def read_field(path: Path, *, hbar: float = 1.0, mass: float = 1.0) -> WaveField:
    return decode_field(path.read_bytes(), hbar=hbar, mass=mass)


def write_snapshots(directory: Path, snapshots: Sequence[WaveField]) -> List[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    return [
        write_field(directory / SNAPSHOT_PATTERN.format(index=i), snap)
        for i, snap in enumerate(snapshots)
    ]


# #### CSV ####


Cell = Union[str, int, float]


def _cell(value: Cell) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(
    path: Path, header: Sequence[str], rows: Iterable[Sequence[Cell]]
) -> Path:
    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    log.debug("Wrote %s", path)
    return path


def _axis_names(dims: int) -> List[str]:
    return ["x", "y"][:dims]


def _coordinates(grid: Grid) -> np.ndarray:
    return np.stack([m.ravel() for m in grid.mesh()], axis=-1)


def write_field_csv(path: Path, field: WaveField) -> Path:
    coords = _coordinates(field.grid)
    psi = field.amplitude.ravel()
    rows = (
        [*map(float, xs), float(z.real), float(z.imag)] for xs, z in zip(coords, psi)
    )
    return write_csv(path, _axis_names(field.grid.dims) + ["re", "im"], rows)


def write_bohm_csv(path: Path, bohm: BohmFields) -> Path:
    """Hydrodynamic fields per grid point; masked-out points carry zeros."""
    grid = bohm.grid
    names = _axis_names(grid.dims)
    columns = [bohm.rho, bohm.S_Q, bohm.Q, bohm.div_v]
    header = names + ["mask", "rho", "S_Q", "Q", "div_v"]
    header += [f"v_{n}" for n in names]
    columns += list(bohm.v)
    if bohm.J is not None:
        header.append("J")
        columns.append(bohm.J.values)
    coords = _coordinates(grid)
    flat = np.stack([np.asarray(c, dtype=float).ravel() for c in columns], axis=-1)
    mask = bohm.mask.ravel()
    rows = (
        [*map(float, xs), int(m), *map(float, vals)]
        for xs, m, vals in zip(coords, mask, flat)
    )
    return write_csv(path, header, rows)


def write_trajectories_csv(path: Path, ensemble: TrajectoryEnsemble) -> Path:
    names = _axis_names(ensemble.dims)
    flags = ensemble.flags

    def rows() -> Iterable[List[Cell]]:
        for p in range(ensemble.count):
            flag = flags[p].value
            for t, pos in zip(ensemble.times, ensemble.positions[:, p]):
                yield [p, float(t), *map(float, pos), flag]

    return write_csv(path, ["particle_id", "t", *names, "flag"], rows())


def write_pattern_csv(path: Path, rows: Sequence[PatternRow]) -> Path:
    return write_csv(
        path,
        ["x", "P", "midline", "rho1", "rho2"],
        ([r.x, r.P, r.midline, r.rho1, r.rho2] for r in rows),
    )


def write_profile_csv(path: Path, y: np.ndarray, profile: np.ndarray) -> Path:
    return write_csv(
        path, ["y", "rho"], ([float(a), float(b)] for a, b in zip(y, profile))
    )


def write_convergence_csv(path: Path, rows: Sequence[ConvergenceRow]) -> Path:
    return write_csv(
        path,
        ["M", "error", "order"],
        (
            [r.slices, r.error, "" if r.order is None else fmt_float(r.order)]
            for r in rows
        ),
    )
