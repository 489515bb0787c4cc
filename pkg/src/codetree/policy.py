"""Hard-coded search policy: decide whether to draft, debug, or improve next.

Rules, in order:

1. Draft while the tree holds fewer drafts than the configured quota.
2. Debug the most recently created buggy leaf still within the debug depth
   limit, if any.
3. Improve the best non-buggy node, if one exists.
4. Otherwise draft again (everything is buggy beyond the depth limit).

The decision is a pure function of the tree and config; no randomness, no
hidden state.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import RunConfig, SolutionTree, Stage


@dataclass(frozen=True)
class PolicyAction:
    """The chosen operator mode plus its target (absent for drafts)."""

    kind: Stage
    target_id: str | None = None


def select(tree: SolutionTree, config: RunConfig) -> PolicyAction:
    if tree.draft_count() < config.num_drafts:
        return PolicyAction(Stage.DRAFT)

    debuggable = [
        leaf
        for leaf in tree.buggy_leaves()
        if tree.debug_depth_of(leaf.id) < config.debug_depth_limit
    ]
    if debuggable:
        newest = max(debuggable, key=lambda n: n.created_step)
        return PolicyAction(Stage.DEBUG, target_id=newest.id)

    best = tree.best_node()
    if best is not None:
        return PolicyAction(Stage.IMPROVE, target_id=best.id)

    return PolicyAction(Stage.DRAFT)
