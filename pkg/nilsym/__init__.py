"""Pipeline engine for nilsym analyses.

Every analysis stage is a :class:`Node` with the ``prep -> exec -> post``
life cycle; a :class:`Flow` walks nodes over a shared dict, following the
action string each ``post`` returns.
"""
from __future__ import annotations

import copy
import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, Optional

__version__ = "0.1.0"

Shared = Dict[str, Any]


class BaseNode:
    def __init__(self) -> None:
        self.params: Dict[str, Any] = {}
        self.successors: Dict[str, "BaseNode"] = {}

    def set_params(self, params: Dict[str, Any]) -> None:
        self.params = params

    def next(self, node: "BaseNode", action: str = "default") -> "BaseNode":
        if action in self.successors:
            warnings.warn(f"Overwriting successor for action '{action}'")
        self.successors[action] = node
        return node

    def prep(self, shared: Shared) -> Any:
        pass

    def exec(self, prep_res: Any) -> Any:
        pass

    def post(self, shared: Shared, prep_res: Any, exec_res: Any) -> Optional[str]:
        pass

    def _exec(self, prep_res: Any) -> Any:
        return self.exec(prep_res)

    def _run(self, shared: Shared) -> Optional[str]:
        p = self.prep(shared)
        e = self._exec(p)
        return self.post(shared, p, e)

    def run(self, shared: Shared) -> Optional[str]:
        if self.successors:
            warnings.warn("Node won't run successors. Use Flow.")
        return self._run(shared)

    def key(self, name: str) -> str:
        """Shared-store key for ``name`` inside this node's namespace."""
        return f"{self.params.get('namespace', '')}{name}"

    def __rshift__(self, other: "BaseNode") -> "BaseNode":
        return self.next(other)

    def __sub__(self, action: str) -> "_ConditionalTransition":
        if isinstance(action, str):
            return _ConditionalTransition(self, action)
        raise TypeError("Action must be a string")


class _ConditionalTransition:
    def __init__(self, src: BaseNode, action: str) -> None:
        self.src, self.action = src, action

    def __rshift__(self, tgt: BaseNode) -> BaseNode:
        return self.src.next(tgt, self.action)


class Node(BaseNode):
    """Node whose ``exec`` is attempted up to ``max_retries`` times.

    ``self.cur_retry`` (0-based) is visible inside ``exec``; randomized stages
    use it to move to a fresh seed. After the last failure ``exec_fallback``
    decides the outcome; the default re-raises.
    """

    def __init__(self, max_retries: int = 1) -> None:
        super().__init__()
        if max_retries < 1:
            raise ValueError("max_retries must be at least 1")
        self.max_retries = max_retries
        self.cur_retry = 0

    def exec_fallback(self, prep_res: Any, exc: Exception) -> Any:
        raise exc

    def _exec(self, prep_res: Any) -> Any:
        for self.cur_retry in range(self.max_retries):
            try:
                return self.exec(prep_res)
            except Exception as e:
                if self.cur_retry == self.max_retries - 1:
                    return self.exec_fallback(prep_res, e)


class Flow(BaseNode):
    def __init__(self, start: Optional[BaseNode] = None) -> None:
        super().__init__()
        self.start_node = start

    def start(self, start: BaseNode) -> BaseNode:
        self.start_node = start
        return start

    def get_next_node(self, curr: BaseNode, action: Optional[str]) -> Optional[BaseNode]:
        nxt = curr.successors.get(action or "default")
        if not nxt and action and curr.successors:
            warnings.warn(f"Flow ends: '{action}' not found in {list(curr.successors)}")
        return nxt

    def _orch(self, shared: Shared, params: Optional[Dict[str, Any]] = None) -> Optional[str]:
        curr = copy.copy(self.start_node)
        p = params or {**self.params}
        last_action = None
        while curr:
            curr.set_params(p)
            last_action = curr._run(shared)
            curr = copy.copy(self.get_next_node(curr, last_action))
        return last_action

    def _run(self, shared: Shared) -> Optional[str]:
        p = self.prep(shared)
        o = self._orch(shared)
        return self.post(shared, p, o)

    def post(self, shared: Shared, prep_res: Any, exec_res: Any) -> Optional[str]:
        return exec_res


class BatchFlow(Flow):
    """Runs the wrapped flow once per parameter dict returned by ``prep``."""

    def _run(self, shared: Shared) -> Optional[str]:
        pr = self.prep(shared) or []
        for bp in pr:
            self._orch(shared, {**self.params, **bp})
        return self.post(shared, pr, None)


class ParallelBatchFlow(BatchFlow):
    """BatchFlow whose orchestrations run on a thread pool.

    Each parameter dict must carry its own ``namespace`` so the runs write
    disjoint keys. The first exception raised by any run propagates after
    all runs have finished.
    """

    def __init__(self, start: Optional[BaseNode] = None, max_workers: Optional[int] = None) -> None:
        super().__init__(start)
        self.max_workers = max_workers

    def _run(self, shared: Shared) -> Optional[str]:
        pr = self.prep(shared) or []
        with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
            futures = [pool.submit(self._orch, shared, {**self.params, **bp}) for bp in pr]
        for f in futures:
            f.result()
        return self.post(shared, pr, None)
