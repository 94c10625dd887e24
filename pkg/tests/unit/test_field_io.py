import csv
import numpy as np
import pathlib
import pytest
from typing import List

from bohm_lab.bohm import decompose
from bohm_lab.field_io import (
    MAGIC,
    FieldFormatError,
    decode_field,
    encode_field,
    read_field,
    write_bohm_csv,
    write_convergence_csv,
    write_csv,
    write_field,
    write_field_csv,
    write_pattern_csv,
    write_snapshots,
    write_trajectories_csv,
)
from bohm_lab.fields import WaveField, gaussian_packet
from bohm_lab.grid import Grid, make_grid
from bohm_lab.interference import PatternRow
from bohm_lab.propagator import ConvergenceRow
from bohm_lab.trajectories import TrajectoryEnsemble


def _rows(path: pathlib.Path) -> List[List[str]]:
    with path.open(newline="") as f:
        return list(csv.reader(f))


@pytest.fixture
def packet(line: Grid) -> WaveField:
    return gaussian_packet(line, [-2.0], 1.0, [1.5])


def test_binary_layout(packet: WaveField) -> None:
    data = encode_field(packet)
    assert data[:5] == MAGIC
    assert len(data) == 5 + 4 + (8 + 16) + 8 + 16 * 256


def test_field_file_keeps_values(tmp_path: pathlib.Path, plane: Grid) -> None:
    field = gaussian_packet(plane, [1.0, -0.5], 1.2, [0.5, 2.0], hbar=2.0)
    field = field.evolved(field.amplitude, 0.375)
    path = write_field(tmp_path / "state.bohm", field)
    loaded = read_field(path, hbar=2.0)
    assert loaded.grid == plane
    assert loaded.time == 0.375
    assert loaded.hbar == 2.0
    assert np.array_equal(loaded.amplitude, field.amplitude)


def test_bad_magic(packet: WaveField) -> None:
    data = b"XXXX1" + encode_field(packet)[5:]
    with pytest.raises(FieldFormatError, match="not a BOHM1 field file"):
        decode_field(data)


@pytest.mark.parametrize("keep", [7, 20, 44, -1])
def test_truncated(packet: WaveField, keep: int) -> None:
    with pytest.raises(FieldFormatError, match="truncated"):
        decode_field(encode_field(packet)[:keep])


def test_trailing_bytes(packet: WaveField) -> None:
    with pytest.raises(FieldFormatError, match="3 trailing bytes"):
        decode_field(encode_field(packet) + b"abc")


def test_unsupported_dims(packet: WaveField) -> None:
    data = MAGIC + np.array([3], dtype="<u4").tobytes() + encode_field(packet)[9:]
    with pytest.raises(FieldFormatError, match="unsupported dimension count 3"):
        decode_field(data)


def test_snapshots(tmp_path: pathlib.Path, packet: WaveField) -> None:
    later = packet.evolved(packet.amplitude, 0.5)
    paths = write_snapshots(tmp_path / "snapshots", [packet, later])
    assert [p.name for p in paths] == ["snapshot-00000.bohm", "snapshot-00001.bohm"]
    assert read_field(paths[1]).time == 0.5


def test_write_csv_formats_floats(tmp_path: pathlib.Path) -> None:
    path = write_csv(tmp_path / "t.csv", ["a", "b", "c"], [[1, 0.1, "x"]])
    assert path.read_text() == "a,b,c\n1,0.10000000000000001,x\n"


def test_field_csv(tmp_path: pathlib.Path, packet: WaveField) -> None:
    rows = _rows(write_field_csv(tmp_path / "field.csv", packet))
    assert rows[0] == ["x", "re", "im"]
    assert len(rows) == 257
    assert float(rows[1][0]) == -20.0
    z = complex(float(rows[129][1]), float(rows[129][2]))
    assert z == packet.amplitude[128]


def test_field_csv_2d(tmp_path: pathlib.Path) -> None:
    grid = make_grid(2, [(0.0, 7.0), (0.0, 8.0)], (8, 9))
    field = WaveField(grid, np.ones(grid.shape, dtype=complex))
    rows = _rows(write_field_csv(tmp_path / "field.csv", field))
    assert rows[0] == ["x", "y", "re", "im"]
    # Row-major: y runs fastest
    assert [(float(r[0]), float(r[1])) for r in rows[1:4]] == [
        (0.0, 0.0),
        (0.0, 1.0),
        (0.0, 2.0),
    ]


def test_bohm_csv(tmp_path: pathlib.Path, packet: WaveField) -> None:
    bohm = decompose(packet)
    rows = _rows(write_bohm_csv(tmp_path / "bohm.csv", bohm))
    assert rows[0][:7] == ["x", "mask", "rho", "S_Q", "Q", "div_v", "v_x"]
    assert (rows[0][-1] == "J") == (bohm.J is not None)
    assert len(rows) == 257
    center = rows[1 + 115]
    assert center[1] == "1"
    assert float(center[6]) == pytest.approx(1.5, abs=1e-9)


def test_trajectories_csv(tmp_path: pathlib.Path) -> None:
    positions = np.array([[[0.0], [1.0]], [[0.5], [1.5]]])
    ensemble = TrajectoryEnsemble(
        times=np.array([0.0, 0.1]), positions=positions, codes=np.array([0, 2])
    )
    rows = _rows(write_trajectories_csv(tmp_path / "traj.csv", ensemble))
    assert rows == [
        ["particle_id", "t", "x", "flag"],
        ["0", "0", "0", "active"],
        ["0", "0.10000000000000001", "0.5", "active"],
        ["1", "0", "1", "exited"],
        ["1", "0.10000000000000001", "1.5", "exited"],
    ]


def test_pattern_csv(tmp_path: pathlib.Path) -> None:
    rows = _rows(
        write_pattern_csv(tmp_path / "p.csv", [PatternRow(0.0, 2.0, 1.0, 0.5, 0.5)])
    )
    assert rows == [
        ["x", "P", "midline", "rho1", "rho2"],
        ["0", "2", "1", "0.5", "0.5"],
    ]


def test_convergence_csv(tmp_path: pathlib.Path) -> None:
    rows = _rows(
        write_convergence_csv(
            tmp_path / "c.csv",
            [
                ConvergenceRow(8, 1 + 0j, 1 + 0j, 0.25, None),
                ConvergenceRow(16, 1 + 0j, 1 + 0j, 0.125, 1.0),
            ],
        )
    )
    assert rows == [["M", "error", "order"], ["8", "0.25", ""], ["16", "0.125", "1.0"]]
