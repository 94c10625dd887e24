from dataclasses import dataclass

import os
import pathlib
import pytest
import subprocess
import sys
from typing import Callable, List


@dataclass(frozen=True)
class SysCap:
    out: str
    err: str


RunCLI = Callable[[List[str]], SysCap]


@pytest.fixture
def ws(tmp_path: pathlib.Path) -> pathlib.Path:
    ret = tmp_path / "ws"
    ret.mkdir()
    return ret


@pytest.fixture
def _run_cli(ws: pathlib.Path, tmp_path: pathlib.Path) -> RunCLI:
    env = dict(os.environ, BOHMLAB_LOG_DIR=str(tmp_path / "logs"))

    def _run(arguments: List[str]) -> SysCap:
        proc = subprocess.run(
            arguments,
            cwd=ws,
            env=env,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            timeout=1800,
        )
        out = proc.stdout.decode(encoding="utf8", errors="replace")
        err = proc.stderr.decode(encoding="utf8", errors="replace")
        if proc.returncode:
            print(f"'{arguments}' failed with {proc.returncode}")
            print(out)
            print(err)
            raise subprocess.CalledProcessError(proc.returncode, arguments[0], out, err)
        return SysCap(out=out.strip(), err=err.strip())

    return _run


@pytest.fixture
def run_cli(_run_cli: RunCLI) -> RunCLI:
    return lambda args: _run_cli(
        [sys.executable, "-m", "bohm_lab", "--show-traceback"] + args
    )
