"""Journal persistence: one JSON document holding the config snapshot and every node.

Schema (format_version 1), field names are part of the contract:

    {
      "format_version": 1,
      "config": {... RunConfig fields, "provider" nested ...},
      "nodes": [
        {"id", "parent_id", "stage", "plan", "code",
         "execution": {"term_out", "exit_status", "exit_code", "exec_time"} | null,
         "metric": {"value", "lower_is_better"} | null,
         "is_buggy", "created_step", "debug_depth",
         "prompt_tokens", "completion_tokens", "latency_s"}
      ]
    }

Writes are atomic (write to a sibling temp file, then rename) so a crash
mid-flush never leaves a torn journal behind.
"""

from __future__ import annotations

import copy
import dataclasses
import json
import os
from pathlib import Path
from typing import Any

from .core import (
    ExecutionResult,
    ExitStatus,
    MetricValue,
    Node,
    ProviderSpec,
    RunConfig,
    SolutionTree,
    Stage,
)
from .errors import CorruptJournal, TreeInvariantError, UnknownNode

FORMAT_VERSION = 1


def config_to_dict(config: RunConfig) -> dict[str, Any]:
    return dataclasses.asdict(config)


def config_from_dict(data: dict[str, Any]) -> RunConfig:
    fields = dict(data)
    provider = fields.pop("provider", {})
    return RunConfig(provider=ProviderSpec(**provider), **fields)


def node_to_dict(node: Node) -> dict[str, Any]:
    execution = None
    if node.execution is not None:
        execution = {
            "term_out": node.execution.term_out,
            "exit_status": node.execution.exit_status.value,
            "exit_code": node.execution.exit_code,
            "exec_time": node.execution.exec_time,
        }
    metric = None
    if node.metric is not None:
        metric = {"value": node.metric.value, "lower_is_better": node.metric.lower_is_better}
    return {
        "id": node.id,
        "parent_id": node.parent_id,
        "stage": node.stage.value,
        "plan": node.plan,
        "code": node.code,
        "execution": execution,
        "metric": metric,
        "is_buggy": node.is_buggy,
        "created_step": node.created_step,
        "debug_depth": node.debug_depth,
        "prompt_tokens": node.prompt_tokens,
        "completion_tokens": node.completion_tokens,
        "latency_s": node.latency_s,
    }


def node_from_dict(data: dict[str, Any]) -> Node:
    execution = None
    if data["execution"] is not None:
        raw = data["execution"]
        execution = ExecutionResult(
            term_out=raw["term_out"],
            exit_status=ExitStatus(raw["exit_status"]),
            exit_code=raw["exit_code"],
            exec_time=raw["exec_time"],
        )
    metric = None
    if data["metric"] is not None:
        metric = MetricValue(
            value=data["metric"]["value"],
            lower_is_better=data["metric"]["lower_is_better"],
        )
    return Node(
        id=data["id"],
        parent_id=data["parent_id"],
        stage=Stage(data["stage"]),
        plan=data["plan"],
        code=data["code"],
        execution=execution,
        metric=metric,
        is_buggy=data["is_buggy"],
        created_step=data["created_step"],
        debug_depth=data["debug_depth"],
        prompt_tokens=data.get("prompt_tokens"),
        completion_tokens=data.get("completion_tokens"),
        latency_s=data.get("latency_s"),
    )


def journal_dict(tree: SolutionTree, config: RunConfig) -> dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "config": config_to_dict(config),
        "nodes": [node_to_dict(n) for n in tree.nodes()],
    }


def dumps(tree: SolutionTree, config: RunConfig) -> str:
    return json.dumps(journal_dict(tree, config), indent=2, sort_keys=True, ensure_ascii=False)


def write_journal(path: str | Path, tree: SolutionTree, config: RunConfig) -> None:
    """Atomically replace ``path`` with the current journal."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(dumps(tree, config), encoding="utf-8")
    os.replace(tmp, path)


def read_journal(path: str | Path) -> tuple[SolutionTree, RunConfig]:
    """Load and revalidate a journal; any invariant violation is a CorruptJournal."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CorruptJournal(f"{path}: {exc}") from exc
    try:
        if data["format_version"] != FORMAT_VERSION:
            raise CorruptJournal(
                f"{path}: unsupported format_version {data['format_version']!r}"
            )
        config = config_from_dict(data["config"])
        tree = SolutionTree()
        for raw in data["nodes"]:
            tree.add(node_from_dict(raw))
    except CorruptJournal:
        raise
    except (KeyError, TypeError, ValueError, TreeInvariantError, UnknownNode) as exc:
        raise CorruptJournal(f"{path}: {exc}") from exc
    return tree, config


def steps_completed(tree: SolutionTree) -> int:
    nodes = tree.nodes()
    return nodes[-1].created_step if nodes else 0


def normalized(journal: dict[str, Any]) -> dict[str, Any]:
    """Copy of a journal dict with wall-clock fields zeroed, for replay comparison."""
    out = copy.deepcopy(journal)
    for node in out.get("nodes", []):
        if node.get("execution"):
            node["execution"]["exec_time"] = 0.0
        node["latency_s"] = 0.0
    return out
