import random
import sys

import pytest

from codetree.core import (
    ExecutionResult,
    ExitStatus,
    MetricValue,
    Node,
    RunConfig,
    SolutionTree,
    Stage,
)


class TreeBuilder:
    """Hand-build valid trees without spelling out every Node field."""

    def __init__(self, lower_is_better: bool = False):
        self.tree = SolutionTree()
        self.lower_is_better = lower_is_better
        self._step = 0

    def add(
        self,
        parent: str | None = None,
        metric: float | None = None,
        term_out: str | None = None,
        stage: Stage | None = None,
        node_id: str | None = None,
        plan: str = "plan",
        code: str = "pass",
    ) -> Node:
        self._step += 1
        buggy = metric is None
        if stage is None:
            if parent is None:
                stage = Stage.DRAFT
            else:
                stage = Stage.DEBUG if self.tree.get(parent).is_buggy else Stage.IMPROVE
        if term_out is None:
            term_out = (
                "Traceback (most recent call last):\nValueError: boom"
                if buggy
                else f"VALIDATION_METRIC: {metric}"
            )
        execution = ExecutionResult(
            term_out=term_out,
            exit_status=ExitStatus.NON_ZERO_EXIT if buggy else ExitStatus.SUCCESS,
            exit_code=1 if buggy else 0,
            exec_time=0.0,
        )
        node = Node(
            id=node_id or f"n{self._step:04d}",
            parent_id=parent,
            stage=stage,
            plan=plan,
            code=code,
            execution=execution,
            metric=None if buggy else MetricValue(metric, self.lower_is_better),
            is_buggy=buggy,
            created_step=self._step,
            debug_depth=self.tree.depth_for_parent(parent),
            prompt_tokens=0,
            completion_tokens=0,
            latency_s=0.0,
        )
        self.tree.add(node)
        return node


def random_tree(
    rng: random.Random,
    max_nodes: int = 30,
    lower_is_better: bool = False,
    p_buggy: float = 0.4,
    metric_decimals: int = 6,
) -> SolutionTree:
    """A random structurally valid tree; coarse metric rounding forces ties."""
    builder = TreeBuilder(lower_is_better)
    for _ in range(rng.randint(0, max_nodes)):
        parents = [None] + [n.id for n in builder.tree.nodes()]
        parent = rng.choice(parents)
        buggy = rng.random() < p_buggy
        metric = None if buggy else round(rng.uniform(0.0, 1.0), metric_decimals)
        builder.add(parent=parent, metric=metric)
    return builder.tree


def brute_force_best(tree: SolutionTree) -> Node | None:
    """Independent argmax: direct float comparison plus earliest-step tie-break."""
    best = None
    for node in tree.nodes():
        if node.is_buggy:
            continue
        if best is None:
            best = node
            continue
        a, b = node.metric.value, best.metric.value
        better = a < b if node.metric.lower_is_better else a > b
        if better or (a == b and node.created_step < best.created_step):
            best = node
    return best


def fenced_reply(plan: str, code: str) -> str:
    return f"{plan}\n\n```python\n{code}\n```"


def sentinel_code(value: float) -> str:
    return f"print('VALIDATION_METRIC: {value}')"


@pytest.fixture
def fast_config(tmp_path):
    """Config suitable for tests: real interpreter, short timeouts, tmp workspace."""

    def factory(**overrides) -> RunConfig:
        defaults = dict(
            num_drafts=1,
            debug_depth_limit=3,
            max_steps=3,
            exec_timeout_s=20.0,
            interpreter_command=f"{sys.executable} {{file}}",
            workspace_dir=str(tmp_path / "workspace"),
        )
        defaults.update(overrides)
        return RunConfig(**defaults)

    return factory
