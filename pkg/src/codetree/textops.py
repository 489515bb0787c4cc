"""Small text helpers: bounded truncation and log-line extraction."""

from __future__ import annotations

import re

_ERROR_LINE = re.compile(r"error|exception|traceback", re.IGNORECASE)


def truncate_middle(text: str, cap: int) -> str:
    """Cap ``text`` at ``cap`` characters, keeping head and tail.

    Tracebacks live at the tail of program output, so the tail half is what
    debugging prompts need most; the head half keeps early context. A marker
    line records how much was dropped. Always returns at most ``cap`` chars.
    """
    if cap <= 0:
        return ""
    if len(text) <= cap:
        return text
    marker = f"\n... ({len(text)} chars total, middle truncated) ...\n"
    if cap <= len(marker):
        return text[:cap]
    keep = cap - len(marker)
    head = keep // 2
    tail = keep - head
    return text[:head] + marker + text[len(text) - tail :]


def last_error_line(term_out: str) -> str:
    """Last line mentioning an error, else the final non-empty line.

    Used both for buggy-node digests in the memory summary and for review
    verdict one-liners.
    """
    lines = [ln.strip() for ln in term_out.splitlines() if ln.strip()]
    for line in reversed(lines):
        if _ERROR_LINE.search(line):
            return line
    return lines[-1] if lines else ""


def first_line(text: str, limit: int = 120) -> str:
    """First non-empty line of ``text``, shortened to ``limit`` chars."""
    for line in text.splitlines():
        stripped = line.strip()
        if stripped:
            return stripped if len(stripped) <= limit else stripped[: limit - 3] + "..."
    return ""
