"""The main loop: select, propose, execute, review, record, flush, repeat.

Each step asks the policy where to grow the tree, builds a prompt from the
bounded memory summary and the static data preview, obtains a proposal,
runs it, reviews the output, and appends exactly one node. The journal is
flushed atomically after every step, so a crash or provider outage never
loses recorded work; ``resume`` picks up from whatever the journal holds.
"""

from __future__ import annotations

import logging
import sys
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable

try:
    import tomllib
except ImportError:  # Python 3.10
    import tomli as tomllib

from .coding import build_prompt, parse_response
from .context import preview, summarize
from .core import ExecutionResult, ExitStatus, Node, RunConfig, SolutionTree
from .errors import FormatError, ProviderUnavailable, SpawnError
from .executor import Workspace, execute, prepare_workspace, reset_for_node
from .journal import read_journal, steps_completed, write_journal
from .policy import select
from .provider import Provider, ProviderRequest, build_provider
from .review import review

log = logging.getLogger(__name__)

ExecuteFn = Callable[[str, Workspace, RunConfig], ExecutionResult]


@dataclass(frozen=True)
class Task:
    """A task descriptor directory: task.md plus optional task.toml and input/."""

    name: str
    description: str
    lower_is_better: bool | None = None
    input_dir: Path | None = None
    interpreter_command: str | None = None


def load_task(task_dir: str | Path) -> Task:
    """Read a task directory. task.md is required; task.toml may set
    direction ("min" or "max"), name, and an interpreter override."""
    root = Path(task_dir)
    description_path = root / "task.md"
    if not description_path.is_file():
        raise FormatError(f"{root}: missing task.md")
    description = description_path.read_text(encoding="utf-8")

    name = root.name
    lower_is_better: bool | None = None
    interpreter = None
    meta_path = root / "task.toml"
    if meta_path.is_file():
        try:
            meta = tomllib.loads(meta_path.read_text(encoding="utf-8"))
        except tomllib.TOMLDecodeError as exc:
            raise FormatError(f"{meta_path}: {exc}") from exc
        name = meta.get("name", name)
        direction = meta.get("direction")
        if direction is not None:
            if direction not in ("min", "max"):
                raise FormatError(f"{meta_path}: direction must be 'min' or 'max'")
            lower_is_better = direction == "min"
        interpreter = meta.get("interpreter")

    input_dir = root / "input"
    return Task(
        name=name,
        description=description,
        lower_is_better=lower_is_better,
        input_dir=input_dir if input_dir.is_dir() else None,
        interpreter_command=interpreter,
    )


def apply_task_overrides(config: RunConfig, task: Task) -> RunConfig:
    """Fold the task's direction and interpreter override into the config."""
    updates = {}
    if task.lower_is_better is not None:
        updates["lower_is_better"] = task.lower_is_better
    if task.interpreter_command:
        updates["interpreter_command"] = task.interpreter_command
    return replace(config, **updates) if updates else config


def run(
    task: Task,
    config: RunConfig,
    provider: Provider,
    *,
    journal_path: str | Path | None = None,
    tree: SolutionTree | None = None,
    review_provider: Provider | None = None,
    execute_fn: ExecuteFn | None = None,
) -> tuple[Node | None, SolutionTree]:
    """Grow the solution tree for up to ``config.max_steps`` steps.

    Returns the best non-buggy node (None when every attempt failed) and the
    full tree. A provider outage aborts cleanly after flushing the journal;
    per-node execution failures only produce buggy nodes.
    """
    config = apply_task_overrides(config, task)
    tree = tree if tree is not None else SolutionTree()
    ws = prepare_workspace(Path(config.workspace_dir), task.input_dir)
    data_preview = preview(ws.input, cap=config.preview_cap)
    run_execute = execute_fn or execute

    def flush() -> None:
        if journal_path is not None:
            write_journal(journal_path, tree, config)

    flush()
    start = steps_completed(tree)
    started_at = time.monotonic()
    for step in range(start + 1, config.max_steps + 1):
        if (
            config.time_budget_s is not None
            and time.monotonic() - started_at >= config.time_budget_s
        ):
            log.info("time budget reached after %d steps", step - 1)
            break

        action = select(tree, config)
        parent = tree.get(action.target_id) if action.target_id else None
        memory = summarize(tree, config.memory_cap)
        bundle = build_prompt(
            action.kind,
            parent,
            memory,
            data_preview,
            task.description,
            prompt_cap=config.prompt_cap,
            debug_output_cap=config.debug_output_cap,
        )
        request = ProviderRequest(
            messages=(("system", bundle.system), ("user", bundle.user)),
            model=config.provider.model,
            temperature=config.provider.temperature,
            mode=action.kind.value,
        )
        try:
            response = provider.complete(request)
        except ProviderUnavailable:
            flush()
            raise
        proposal = parse_response(response.text, action.kind)

        reset_for_node(ws)
        try:
            execution = run_execute(proposal.code, ws, config)
        except SpawnError as exc:
            log.warning("step %d: %s", step, exc)
            execution = ExecutionResult(
                term_out=str(exc),
                exit_status=ExitStatus.SPAWN_ERROR,
                exit_code=None,
                exec_time=0.0,
            )
        verdict = review(execution, config.lower_is_better, provider=review_provider)

        node = Node(
            id=f"n{step:04d}",
            parent_id=action.target_id,
            stage=action.kind,
            plan=proposal.plan,
            code=proposal.code,
            execution=execution,
            metric=verdict.metric,
            is_buggy=verdict.is_buggy,
            created_step=step,
            debug_depth=tree.depth_for_parent(action.target_id),
            prompt_tokens=response.prompt_tokens,
            completion_tokens=response.completion_tokens,
            latency_s=response.latency_s,
        )
        tree.add(node)
        flush()
        log.info(
            "step %d: %s -> %s",
            step,
            action.kind.value,
            "buggy" if node.is_buggy else f"metric {node.metric.value:g}",
        )

    return tree.best_node(), tree


def resume(
    journal_path: str | Path,
    provider: Provider | None = None,
    *,
    task: Task | None = None,
    review_provider: Provider | None = None,
    execute_fn: ExecuteFn | None = None,
) -> tuple[Node | None, SolutionTree]:
    """Continue a journaled run until max_steps; a finished run returns as-is.

    The provider is fast-forwarded one reply per completed step so a resumed
    playbook run behaves exactly like an uninterrupted one.
    """
    tree, config = read_journal(journal_path)
    if task is None:
        if not config.task_dir:
            raise FormatError(f"{journal_path}: no task_dir recorded; pass the task explicitly")
        task = load_task(config.task_dir)
    if provider is None:
        provider = build_provider(config.provider)
    done = steps_completed(tree)
    if done >= config.max_steps:
        return tree.best_node(), tree
    skip = getattr(provider, "skip", None)
    if callable(skip):
        skip(done)
    return run(
        task,
        config,
        provider,
        journal_path=journal_path,
        tree=tree,
        review_provider=review_provider,
        execute_fn=execute_fn,
    )


def _default_interpreter() -> str:
    return f"{sys.executable} {{file}}"
