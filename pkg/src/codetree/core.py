"""Domain model: metric values, execution results, solution nodes, the tree, run config.

The tree is rooted at an implicit empty solution; draft nodes have no
``parent_id`` and are understood as children of that root. Value types are
frozen and safe to share; the tree itself is mutated only by its single owner
(the agent loop).
"""

from __future__ import annotations

import math
import shlex
from dataclasses import dataclass, field
from enum import Enum

from .errors import DirectionMismatch, TreeInvariantError, UnknownNode


class Stage(str, Enum):
    """How a node was produced: fresh draft, bug fix, or refinement."""

    DRAFT = "draft"
    DEBUG = "debug"
    IMPROVE = "improve"


class ExitStatus(str, Enum):
    SUCCESS = "success"
    NON_ZERO_EXIT = "non_zero_exit"
    TIMEOUT = "timeout"
    SPAWN_ERROR = "spawn_error"


@dataclass(frozen=True)
class MetricValue:
    """A finite scalar score plus the direction in which it improves."""

    value: float
    lower_is_better: bool = False

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            raise ValueError(f"metric value must be finite, got {self.value!r}")

    def __lt__(self, other: "MetricValue") -> bool:
        return compare(self, other) < 0

    def __le__(self, other: "MetricValue") -> bool:
        return compare(self, other) <= 0

    def __gt__(self, other: "MetricValue") -> bool:
        return compare(self, other) > 0

    def __ge__(self, other: "MetricValue") -> bool:
        return compare(self, other) >= 0


def compare(a: MetricValue, b: MetricValue) -> int:
    """Order two metric values by goodness.

    Returns a positive number when ``a`` is better, negative when ``b`` is
    better, zero when equal. Both values must share a direction.
    """
    if a.lower_is_better != b.lower_is_better:
        raise DirectionMismatch(
            f"cannot compare lower_is_better={a.lower_is_better} "
            f"with lower_is_better={b.lower_is_better}"
        )
    if a.value == b.value:
        return 0
    a_better = a.value < b.value if a.lower_is_better else a.value > b.value
    return 1 if a_better else -1


@dataclass(frozen=True)
class ExecutionResult:
    """Captured outcome of running one candidate program.

    ``term_out`` interleaves stdout and stderr chronologically and is capped
    at the configured size (head and tail retained, marker in between).
    """

    term_out: str
    exit_status: ExitStatus
    exit_code: int | None
    exec_time: float


@dataclass(frozen=True)
class Node:
    """One candidate solution: a vertex of the solution tree.

    ``debug_depth`` counts consecutive buggy ancestors starting from the
    parent, stopping at the first non-buggy ancestor or the root. A node
    carries a metric exactly when it is not buggy.
    """

    id: str
    parent_id: str | None
    stage: Stage
    plan: str
    code: str
    execution: ExecutionResult | None
    metric: MetricValue | None
    is_buggy: bool
    created_step: int
    debug_depth: int
    prompt_tokens: int | None = None
    completion_tokens: int | None = None
    latency_s: float | None = None

    def __post_init__(self) -> None:
        if (self.metric is None) != self.is_buggy:
            raise TreeInvariantError(
                f"node {self.id}: metric must be present exactly when not buggy"
            )
        if self.created_step < 0 or self.debug_depth < 0:
            raise TreeInvariantError(f"node {self.id}: negative step or depth")


class SolutionTree:
    """Append-only tree of candidate solutions rooted at the empty solution.

    Insertion validates every structural invariant; nodes are never removed
    or mutated afterwards.
    """

    def __init__(self) -> None:
        self._nodes: dict[str, Node] = {}
        self._children: dict[str, list[str]] = {}
        self._direction: bool | None = None

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._nodes

    def nodes(self) -> list[Node]:
        """All nodes in insertion order."""
        return list(self._nodes.values())

    def get(self, node_id: str) -> Node:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownNode(node_id) from None

    def children_of(self, node_id: str) -> list[Node]:
        return [self._nodes[c] for c in self._children.get(node_id, [])]

    def is_leaf(self, node_id: str) -> bool:
        if node_id not in self._nodes:
            raise UnknownNode(node_id)
        return not self._children.get(node_id)

    def add(self, node: Node) -> None:
        if node.id in self._nodes:
            raise TreeInvariantError(f"duplicate node id {node.id}")
        if (node.parent_id is None) != (node.stage is Stage.DRAFT):
            raise TreeInvariantError(
                f"node {node.id}: stage {node.stage.value} inconsistent with "
                f"parent_id {node.parent_id!r} (drafts and only drafts hang off the root)"
            )
        if node.parent_id is not None and node.parent_id not in self._nodes:
            raise TreeInvariantError(f"node {node.id}: unknown parent {node.parent_id}")
        if self._nodes:
            last = next(reversed(self._nodes.values()))
            if node.created_step <= last.created_step:
                raise TreeInvariantError(
                    f"node {node.id}: created_step {node.created_step} not after "
                    f"{last.created_step}"
                )
        expected_depth = self.depth_for_parent(node.parent_id)
        if node.debug_depth != expected_depth:
            raise TreeInvariantError(
                f"node {node.id}: debug_depth {node.debug_depth}, expected {expected_depth}"
            )
        if node.metric is not None:
            if self._direction is None:
                self._direction = node.metric.lower_is_better
            elif node.metric.lower_is_better != self._direction:
                raise TreeInvariantError(
                    f"node {node.id}: metric direction differs from the tree's"
                )
        self._nodes[node.id] = node
        if node.parent_id is not None:
            self._children.setdefault(node.parent_id, []).append(node.id)

    def depth_for_parent(self, parent_id: str | None) -> int:
        """debug_depth a new child of ``parent_id`` would carry."""
        depth = 0
        current = parent_id
        while current is not None:
            parent = self._nodes.get(current)
            if parent is None:
                raise UnknownNode(current)
            if not parent.is_buggy:
                break
            depth += 1
            current = parent.parent_id
        return depth

    def debug_depth_of(self, node_id: str) -> int:
        """Consecutive buggy ancestors of ``node_id``, counted from its parent."""
        return self.depth_for_parent(self.get(node_id).parent_id)

    def best_node(self) -> Node | None:
        """Argmax over non-buggy nodes; earliest created_step wins ties."""
        best: Node | None = None
        for node in self._nodes.values():
            if node.is_buggy or node.metric is None:
                continue
            if best is None or compare(node.metric, best.metric) > 0:
                best = node
        return best

    def draft_count(self) -> int:
        return sum(1 for n in self._nodes.values() if n.stage is Stage.DRAFT)

    def buggy_leaves(self) -> list[Node]:
        """Buggy nodes with no children, in insertion order."""
        return [
            n
            for n in self._nodes.values()
            if n.is_buggy and not self._children.get(n.id)
        ]


@dataclass(frozen=True)
class ProviderSpec:
    """Which completion provider to use and how to reach it.

    The secret itself is never stored; ``api_key_env`` names the environment
    variable holding it.
    """

    kind: str = "http"  # "http" or "playbook"
    endpoint: str = ""
    model: str = ""
    api_key_env: str = "CODETREE_API_KEY"
    playbook_path: str = ""
    max_retries: int = 3
    backoff_s: float = 0.5
    request_timeout_s: float = 120.0
    temperature: float = 0.2


@dataclass(frozen=True)
class RunConfig:
    """Knobs for one agent run.

    ``interpreter_command`` is a shell-style template with a ``{file}``
    placeholder for the candidate path. ``max_steps`` is the loop bound N;
    ``max_steps = 0`` means the empty run (otherwise drafts must fit:
    ``num_drafts <= max_steps``).
    """

    num_drafts: int = 5
    debug_depth_limit: int = 3
    max_steps: int = 20
    time_budget_s: float | None = None
    exec_timeout_s: float = 600.0
    timeout_grace_s: float = 2.0
    interpreter_command: str = "python3 {file}"
    lower_is_better: bool = False
    workspace_dir: str = "workspace"
    task_dir: str = ""
    provider: ProviderSpec = field(default_factory=ProviderSpec)
    term_out_cap: int = 64 * 1024
    memory_cap: int = 8192
    preview_cap: int = 4096
    prompt_cap: int = 32 * 1024
    debug_output_cap: int = 8192

    def __post_init__(self) -> None:
        if self.num_drafts < 1:
            raise ValueError("num_drafts must be >= 1")
        if self.max_steps < 0:
            raise ValueError("max_steps must be >= 0")
        if self.max_steps > 0 and self.num_drafts > self.max_steps:
            raise ValueError("num_drafts must not exceed max_steps")
        if self.exec_timeout_s <= 0:
            raise ValueError("exec_timeout_s must be positive")
        if self.debug_depth_limit < 1:
            raise ValueError("debug_depth_limit must be >= 1")
        if "{file}" not in self.interpreter_command:
            raise ValueError("interpreter_command needs a {file} placeholder")
        shlex.split(self.interpreter_command)  # fail fast on unparseable template
