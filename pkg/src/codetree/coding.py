"""Prompt assembly for the three operator modes, and response parsing.

Draft asks for a brand-new single-file program; debug repairs a buggy parent
using its captured output; improve requests exactly one atomic change to a
working parent. Every bundle fits the configured prompt cap no matter how
large the tree or the parent's output grew.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .context import DataPreview, MemorySummary
from .core import Node, Stage
from .errors import EmptyResponse, PreconditionViolation
from .review import SENTINEL_PREFIX
from .textops import truncate_middle

SYSTEM_PROMPT = (
    "You are an expert machine learning engineer. You respond with a short plan "
    "in plain prose followed by exactly one fenced code block containing a "
    "complete single-file program. No text after the code block."
)

_OUTPUT_CONTRACT = (
    f'- print the validation score as its own line "{SENTINEL_PREFIX} <number>"\n'
    "- write predictions for the holdout inputs to ./submission/submission.csv\n"
    "- read all task data from ./input (treat it as read-only)"
)

DRAFT_INSTRUCTIONS = (
    "Write a completely new solution from scratch.\n"
    "Start with a one-paragraph plan that names the modeling approach and the "
    "hyperparameter values you chose, then give exactly one fenced code block "
    "with the full program. The program must:\n"
    "- hold out part of the training data as its own validation split\n" + _OUTPUT_CONTRACT
)

DEBUG_INSTRUCTIONS = (
    "The solution below failed. Using its code and the captured output, fix the "
    "defects while preserving the overall approach. Start with one short "
    "paragraph describing the fix, then give exactly one fenced code block with "
    "the complete corrected program. Keep the output contract:\n" + _OUTPUT_CONTRACT
)

IMPROVE_INSTRUCTIONS_TEMPLATE = (
    "The working solution below currently reports validation metric {metric:g} "
    "({direction} is better). Propose exactly ONE atomic change, such as a "
    "different model, feature, or hyperparameter, so its effect on the metric "
    "is directly measurable. Do not bundle several edits. Start with one short "
    "paragraph naming that single change, then give exactly one fenced code "
    "block with the complete updated program. Keep the output contract:\n" + _OUTPUT_CONTRACT
)


@dataclass(frozen=True)
class PromptBundle:
    system: str
    user: str


@dataclass(frozen=True)
class Proposal:
    plan: str
    code: str
    mode: Stage

    def __post_init__(self) -> None:
        if not self.code.strip():
            raise ValueError("proposal code must be nonempty")


def build_prompt(
    mode: Stage,
    parent: Node | None,
    memory: MemorySummary,
    preview: DataPreview,
    task_description: str,
    *,
    prompt_cap: int = 32 * 1024,
    debug_output_cap: int = 8192,
) -> PromptBundle:
    """Assemble the user prompt for one operator invocation.

    Raises PreconditionViolation when the parent does not match the mode:
    drafts take no parent, debug takes a buggy parent, improve a non-buggy one.
    """
    if mode is Stage.DRAFT:
        if parent is not None:
            raise PreconditionViolation("draft mode takes no parent node")
    elif parent is None:
        raise PreconditionViolation(f"{mode.value} mode requires a parent node")
    elif mode is Stage.DEBUG and not parent.is_buggy:
        raise PreconditionViolation("debug mode requires a buggy parent")
    elif mode is Stage.IMPROVE and parent.is_buggy:
        raise PreconditionViolation("improve mode requires a non-buggy parent")

    sections = [
        "# Task",
        task_description.strip(),
        "# Data overview",
        preview.text,
        "# Prior attempts",
        memory.render() or "(none yet)",
        "# Instructions",
    ]
    if mode is Stage.DRAFT:
        sections.append(DRAFT_INSTRUCTIONS)
    elif mode is Stage.DEBUG:
        sections.append(DEBUG_INSTRUCTIONS)
        sections.append(f"# Previous solution (node {parent.id})")
        sections.append(f"```python\n{parent.code}\n```")
        term_out = parent.execution.term_out if parent.execution else ""
        sections.append("# Captured output")
        sections.append(truncate_middle(term_out, debug_output_cap))
    else:
        direction = "lower" if parent.metric.lower_is_better else "higher"
        sections.append(
            IMPROVE_INSTRUCTIONS_TEMPLATE.format(
                metric=parent.metric.value, direction=direction
            )
        )
        sections.append(f"# Current solution (node {parent.id})")
        sections.append(f"```python\n{parent.code}\n```")

    user = "\n\n".join(sections)
    # Last-resort bound: adversarial parents (huge code) must still fit.
    user = truncate_middle(user, prompt_cap)
    return PromptBundle(system=SYSTEM_PROMPT, user=user)


_FENCE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)


def parse_response(text: str, mode: Stage) -> Proposal:
    """Split provider text into (plan, code).

    The largest fenced block becomes the code and everything before the first
    fence the plan; with no usable fence the whole text is treated as code.
    """
    if not text.strip():
        raise EmptyResponse("provider returned whitespace-only text")
    matches = [m for m in _FENCE.finditer(text) if m.group(1).strip()]
    if not matches:
        return Proposal(plan="", code=text.strip(), mode=mode)
    largest = max(matches, key=lambda m: len(m.group(1)))
    plan = text[: matches[0].start()].strip()
    code = largest.group(1).removesuffix("\n")
    return Proposal(plan=plan, code=code, mode=mode)


def render_proposal(plan: str, code: str) -> str:
    """Inverse of parse_response for well-formed plan/code pairs."""
    prefix = f"{plan}\n\n" if plan else ""
    return f"{prefix}```python\n{code}\n```\n"
