import dataclasses

from rich.console import Console


@dataclasses.dataclass(frozen=True)
class Root:
    console: Console
    verbosity: int
    show_traceback: bool
    threads: int = 1
