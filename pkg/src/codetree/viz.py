"""Solution-tree export: DOT and JSON graph renderings of a journal."""

from __future__ import annotations

import json
from typing import Any

from .core import Node, SolutionTree

ROOT_ID = "root"


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


def _node_label(node: Node) -> str:
    outcome = "buggy" if node.is_buggy else f"metric={node.metric.value:.6g}"
    return f"{node.id}\n{node.stage.value}\n{outcome}"


def to_dot(tree: SolutionTree) -> str:
    """Graphviz rendering: stages label the edges, buggy nodes are boxes."""
    lines = [
        "digraph solution_tree {",
        "  rankdir=TB;",
        f'  {ROOT_ID} [label="empty solution", shape=doublecircle];',
    ]
    for node in tree.nodes():
        shape = "box" if node.is_buggy else "ellipse"
        lines.append(f'  {node.id} [label="{_escape(_node_label(node))}", shape={shape}];')
    for node in tree.nodes():
        parent = node.parent_id or ROOT_ID
        lines.append(f'  {parent} -> {node.id} [label="{node.stage.value}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json_graph(tree: SolutionTree) -> dict[str, Any]:
    nodes: list[dict[str, Any]] = [{"id": ROOT_ID, "kind": "root"}]
    edges: list[dict[str, Any]] = []
    for node in tree.nodes():
        nodes.append(
            {
                "id": node.id,
                "kind": "node",
                "stage": node.stage.value,
                "is_buggy": node.is_buggy,
                "metric": None if node.metric is None else node.metric.value,
                "created_step": node.created_step,
            }
        )
        edges.append(
            {
                "from": node.parent_id or ROOT_ID,
                "to": node.id,
                "mode": node.stage.value,
            }
        )
    return {"nodes": nodes, "edges": edges}


def to_json(tree: SolutionTree) -> str:
    return json.dumps(to_json_graph(tree), indent=2, sort_keys=True) + "\n"
