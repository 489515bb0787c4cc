"""Turn an execution result into a verdict: buggy, or scored with a metric.

The deterministic path looks for the sentinel line candidates are instructed
to print. When a provider is supplied and no sentinel is present, a
structured review is requested; anything unparseable degrades to a buggy
verdict rather than aborting the run.
"""

from __future__ import annotations

import json
import logging
import math
import re
from dataclasses import dataclass
from typing import Any

from .core import ExecutionResult, ExitStatus, MetricValue
from .errors import ContractViolation
from .textops import last_error_line, truncate_middle

log = logging.getLogger(__name__)

SENTINEL_PREFIX = "VALIDATION_METRIC:"
SENTINEL_RE = re.compile(r"^\s*VALIDATION_METRIC:\s*(\S+)\s*$", re.MULTILINE)

_REVIEW_SYSTEM = (
    "You judge the output of a machine learning program. Respond with ONLY a "
    'JSON object of the form {"is_bug": <bool>, "metric": <number or null>, '
    '"summary": "<one line>"}. is_bug is true when the run failed or reported '
    "no usable validation score; metric is the validation score when present."
)


@dataclass(frozen=True)
class ReviewVerdict:
    is_buggy: bool
    metric: MetricValue | None
    summary: str

    def __post_init__(self) -> None:
        if (self.metric is None) != self.is_buggy:
            raise ValueError("metric must be present exactly when not buggy")


def _buggy(summary: str) -> ReviewVerdict:
    return ReviewVerdict(is_buggy=True, metric=None, summary=summary)


def review(
    execution: ExecutionResult,
    lower_is_better: bool,
    provider: Any = None,
    model: str = "",
) -> ReviewVerdict:
    """Score one execution. Non-success exits are always buggy.

    On success the sentinel line wins (last occurrence if several); the
    optional provider review runs only when no sentinel is present.
    """
    if execution.exit_status is ExitStatus.TIMEOUT:
        return _buggy(f"timed out after {execution.exec_time:.1f}s")
    if execution.exit_status is ExitStatus.SPAWN_ERROR:
        return _buggy(last_error_line(execution.term_out) or "interpreter could not start")
    if execution.exit_status is ExitStatus.NON_ZERO_EXIT:
        hint = last_error_line(execution.term_out)
        return _buggy(hint or f"exited with code {execution.exit_code}")

    sentinels = SENTINEL_RE.findall(execution.term_out)
    if sentinels:
        try:
            value = float(sentinels[-1])
        except ValueError:
            return _buggy(f"unparseable metric {sentinels[-1]!r}")
        if not math.isfinite(value):
            return _buggy(f"non-finite metric {sentinels[-1]}")
        return ReviewVerdict(
            is_buggy=False,
            metric=MetricValue(value, lower_is_better),
            summary=f"reported {SENTINEL_PREFIX} {value:g}",
        )

    if provider is not None:
        try:
            return _provider_review(execution, lower_is_better, provider, model)
        except ContractViolation as exc:
            log.warning("provider review unusable: %s", exc)
            return _buggy("provider review unparseable")

    return _buggy("no metric reported")


def _provider_review(
    execution: ExecutionResult, lower_is_better: bool, provider: Any, model: str
) -> ReviewVerdict:
    from .provider import ProviderRequest  # deferred: keeps `requests` off this module's import path

    request = ProviderRequest(
        messages=(
            ("system", _REVIEW_SYSTEM),
            ("user", "Program output:\n\n" + truncate_middle(execution.term_out, 8192)),
        ),
        model=model,
        mode="review",
    )
    reply = provider.complete(request).text.strip()
    if reply.startswith("```"):
        reply = re.sub(r"^```[^\n]*\n|```$", "", reply).strip()
    try:
        data = json.loads(reply)
    except json.JSONDecodeError as exc:
        raise ContractViolation(f"review reply is not JSON: {exc}") from exc
    if not isinstance(data, dict) or "is_bug" not in data:
        raise ContractViolation("review reply missing is_bug")
    summary = str(data.get("summary", "")) or "(no summary)"
    if data["is_bug"]:
        return _buggy(summary)
    metric = data.get("metric")
    if not isinstance(metric, (int, float)) or not math.isfinite(float(metric)):
        raise ContractViolation(f"review reply metric unusable: {metric!r}")
    return ReviewVerdict(
        is_buggy=False,
        metric=MetricValue(float(metric), lower_is_better),
        summary=summary,
    )
