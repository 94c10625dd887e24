import logging
import pathlib
import pytest
from typing import Iterator

from bohm_lab.grid import Grid, make_grid


@pytest.fixture
def assets() -> pathlib.Path:
    return pathlib.Path(__file__).parent


@pytest.fixture
def line() -> Grid:
    return make_grid(1, [(-20.0, 20.0)], 256, endpoint=False)


@pytest.fixture
def plane() -> Grid:
    return make_grid(2, [(-8.0, 8.0), (-8.0, 8.0)], 64, endpoint=False)


@pytest.fixture(autouse=True)
def _log_dir(tmp_path: pathlib.Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("BOHMLAB_LOG_DIR", str(tmp_path / "logs"))


@pytest.fixture(autouse=True)
def _reset_logging() -> Iterator[None]:
    root = logging.getLogger()
    handlers = list(root.handlers)
    yield
    for handler in root.handlers[:]:
        if handler not in handlers:
            root.removeHandler(handler)
            handler.close()
