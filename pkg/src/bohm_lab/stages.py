# Run stage graph
#
# Stages become ready once every dependency has finished. A stage whose
# dependency did not succeed is skipped instead of run.

from dataclasses import dataclass, field

import datetime
import logging
from collections import defaultdict
from typing import AbstractSet, Dict, List, Mapping, Optional, Set

from .types import StageStatus


log = logging.getLogger(__name__)


class CycleError(ValueError):
    pass


class StageSorter:
    def __init__(self, graph: Mapping[str, AbstractSet[str]]):
        for node, deps in graph.items():
            unknown = set(deps) - graph.keys()
            if unknown:
                raise ValueError(f"stage '{node}' needs unknown {sorted(unknown)}")
        self._graph = graph
        self._rev_deps: Dict[str, Set[str]] = defaultdict(set)
        self._deps_cnt: Dict[str, int] = {}
        self._status: Dict[str, StageStatus] = {}
        self._ready: Set[str] = set()
        for node, deps in graph.items():
            if not deps:
                self._ready.add(node)
            self._deps_cnt[node] = len(deps)
            for dep in deps:
                self._rev_deps[dep].add(node)
        self._check_cycle()

    def _check_cycle(self) -> None:
        done: Set[str] = set()
        for start in self._graph:
            if start in done:
                continue
            on_path: Set[str] = set()
            stack = [(start, iter(sorted(self._graph[start])))]
            on_path.add(start)
            while stack:
                node, deps = stack[-1]
                dep = next(deps, None)
                if dep is None:
                    stack.pop()
                    on_path.discard(node)
                    done.add(node)
                elif dep in on_path:
                    raise CycleError(f"stage '{dep}' depends on itself")
                elif dep not in done:
                    on_path.add(dep)
                    stack.append((dep, iter(sorted(self._graph[dep]))))

    def status(self, node: str) -> StageStatus:
        return self._status.get(node, StageStatus.PENDING)

    def mark(self, node: str, status: StageStatus) -> None:
        assert status.is_finished, status
        if node in self._status:
            return  # Already finished
        self._status[node] = status
        for rev_node in self._rev_deps[node]:
            self._deps_cnt[rev_node] -= 1
            if self._deps_cnt[rev_node] == 0:
                self._ready.add(rev_node)

    def blocked_by(self, node: str) -> List[str]:
        """Dependencies that finished without success."""
        return sorted(
            dep
            for dep in self._graph[node]
            if self.status(dep) != StageStatus.SUCCEEDED
        )

    def is_all_finished(self) -> bool:
        return len(self._status) == len(self._graph)

    def get_ready(self) -> List[str]:
        # Sorted for a reproducible execution order
        ret = sorted(self._ready)
        self._ready = set()
        return ret


@dataclass
class StageRecord:
    name: str
    status: StageStatus = StageStatus.PENDING
    started: Optional[datetime.datetime] = None
    finished: Optional[datetime.datetime] = None
    error: Optional[BaseException] = None
    notes: List[str] = field(default_factory=list)

    @property
    def duration(self) -> Optional[datetime.timedelta]:
        if self.started is None or self.finished is None:
            return None
        return self.finished - self.started
