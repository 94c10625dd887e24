import logging
import os
from datetime import datetime, timedelta, timezone
from pathlib import Path
from random import random
from typing import Optional


DATETIME_FORMAT = "%Y-%m-%d_%H-%M-%S"
LOGS_DIR_ENV = "BOHMLAB_LOG_DIR"
FILE_FORMAT_PREFIX = "bohm-lab-run-"
FILE_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
LOGS_ROTATION_DELAY = timedelta(days=3)


def logs_dir() -> Path:
    custom = os.environ.get(LOGS_DIR_ENV)
    if custom:
        return Path(custom).expanduser()
    return Path("~/.bohm-lab/logs").expanduser()


def get_handler() -> logging.FileHandler:
    if random() < 0.1:  # Only do cleanup for 10% of runs
        _do_rotation(LOGS_ROTATION_DELAY)
    return _get_handler()


_file_path_cached: Optional[Path] = None


def get_log_file_path() -> Path:
    global _file_path_cached
    if _file_path_cached is None:
        now = datetime.now(timezone.utc)
        time_str = now.strftime(DATETIME_FORMAT)
        _file_path_cached = logs_dir() / f"{FILE_FORMAT_PREFIX}{time_str}.txt"
    return _file_path_cached


def _get_handler() -> logging.FileHandler:
    path = get_log_file_path()
    path.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(path)
    handler.setFormatter(logging.Formatter(FILE_FORMAT))
    return handler


def _do_rotation(delay: timedelta) -> None:
    now = datetime.now(timezone.utc)
    directory = logs_dir()
    if not directory.exists():
        return
    for log_file in directory.iterdir():
        if not log_file.is_file() or not log_file.name.startswith(FILE_FORMAT_PREFIX):
            continue
        time_str = log_file.stem[len(FILE_FORMAT_PREFIX) :]
        try:
            log_time = datetime.strptime(time_str, DATETIME_FORMAT)
        except ValueError:
            continue
        log_time = log_time.replace(tzinfo=timezone.utc)
        if log_time + delay < now:
            log_file.unlink()
