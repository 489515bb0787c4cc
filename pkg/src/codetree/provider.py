"""Completion providers: a chat-completions HTTP client and a scripted playbook.

The HTTP side speaks the common chat-completions JSON contract against any
configurable endpoint; transient failures (connection errors, 429, 5xx) are
retried with exponential backoff. The playbook side serves canned replies in
order and is what makes whole runs reproducible offline.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import requests

from .core import ProviderSpec
from .errors import (
    AuthError,
    ContractViolation,
    PlaybookExhausted,
    PlaybookMismatch,
    ProviderUnavailable,
)


@dataclass(frozen=True)
class ProviderRequest:
    """One completion call: (role, content) messages plus sampling settings.

    ``mode`` tags which operator asked (draft/debug/improve/review); only
    playbook assertions look at it.
    """

    messages: tuple[tuple[str, str], ...]
    model: str = ""
    temperature: float = 0.2
    mode: str | None = None

    def prompt_text(self) -> str:
        return "\n".join(content for _, content in self.messages)


@dataclass(frozen=True)
class ProviderResponse:
    text: str
    prompt_tokens: int | None
    completion_tokens: int | None
    latency_s: float


class Provider(Protocol):
    def complete(self, request: ProviderRequest) -> ProviderResponse: ...


@dataclass(frozen=True)
class PlaybookEntry:
    reply: str
    mode: str | None = None
    must_contain: str | None = None
    prompt_tokens: int = 0
    completion_tokens: int = 0


class PlaybookProvider:
    """Serves scripted replies in order, asserting mode/prompt expectations.

    A mismatch fails loudly (the run script is wrong); running out of replies
    is reported as provider unavailability, which the agent loop treats as a
    clean abort.
    """

    def __init__(self, entries: list[PlaybookEntry] | tuple[PlaybookEntry, ...]):
        if not entries:
            raise ValueError("playbook needs at least one entry")
        self._entries = list(entries)
        self._pos = 0

    @property
    def remaining(self) -> int:
        return len(self._entries) - self._pos

    def skip(self, count: int) -> None:
        """Fast-forward past replies already consumed by a resumed run."""
        self._pos = min(self._pos + count, len(self._entries))

    def complete(self, request: ProviderRequest) -> ProviderResponse:
        if self._pos >= len(self._entries):
            raise PlaybookExhausted(f"playbook exhausted after {len(self._entries)} replies")
        entry = self._entries[self._pos]
        self._pos += 1
        if entry.mode is not None and entry.mode != request.mode:
            raise PlaybookMismatch(
                f"reply {self._pos} expected mode {entry.mode!r}, got {request.mode!r}"
            )
        if entry.must_contain is not None and entry.must_contain not in request.prompt_text():
            raise PlaybookMismatch(
                f"reply {self._pos} expected prompt to contain {entry.must_contain!r}"
            )
        return ProviderResponse(
            text=entry.reply,
            prompt_tokens=entry.prompt_tokens,
            completion_tokens=entry.completion_tokens,
            latency_s=0.0,
        )


def load_playbook(path: str | Path) -> PlaybookProvider:
    """Read a playbook script: a JSON array of entry objects.

    Entry fields: reply (required), mode, must_contain, prompt_tokens,
    completion_tokens.
    """
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ContractViolation(f"playbook {path}: {exc}") from exc
    if not isinstance(raw, list) or not raw:
        raise ContractViolation(f"playbook {path}: expected a nonempty JSON array")
    entries = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict) or "reply" not in item:
            raise ContractViolation(f"playbook {path}: entry {i} needs a reply field")
        entries.append(
            PlaybookEntry(
                reply=item["reply"],
                mode=item.get("mode"),
                must_contain=item.get("must_contain"),
                prompt_tokens=int(item.get("prompt_tokens", 0)),
                completion_tokens=int(item.get("completion_tokens", 0)),
            )
        )
    return PlaybookProvider(entries)


class HttpProvider:
    """Blocking chat-completions client with bounded retries."""

    def __init__(self, spec: ProviderSpec, session: requests.Session | None = None):
        if not spec.endpoint:
            raise ValueError("http provider needs an endpoint")
        self._spec = spec
        self._session = session or requests.Session()

    def complete(self, request: ProviderRequest) -> ProviderResponse:
        spec = self._spec
        payload = {
            "model": request.model or spec.model,
            "messages": [{"role": r, "content": c} for r, c in request.messages],
            "temperature": request.temperature,
        }
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(spec.api_key_env, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"

        last_error: Exception | None = None
        for attempt in range(spec.max_retries + 1):
            if attempt:
                time.sleep(spec.backoff_s * 2 ** (attempt - 1))
            started = time.monotonic()
            try:
                resp = self._session.post(
                    spec.endpoint,
                    json=payload,
                    headers=headers,
                    timeout=spec.request_timeout_s,
                )
            except requests.RequestException as exc:
                last_error = exc
                continue
            if resp.status_code in (401, 403):
                raise AuthError(f"provider rejected credentials (HTTP {resp.status_code})")
            if resp.status_code == 429 or resp.status_code >= 500:
                last_error = ProviderUnavailable(f"HTTP {resp.status_code}: {resp.text[:200]}")
                continue
            if resp.status_code != 200:
                raise ContractViolation(f"HTTP {resp.status_code}: {resp.text[:500]}")
            return self._parse(resp, time.monotonic() - started)
        raise ProviderUnavailable(
            f"provider unreachable after {spec.max_retries + 1} attempts: {last_error}"
        )

    @staticmethod
    def _parse(resp: requests.Response, latency: float) -> ProviderResponse:
        try:
            data = resp.json()
            text = data["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ContractViolation(f"malformed provider payload: {exc}") from exc
        if not isinstance(text, str):
            raise ContractViolation("provider message content is not text")
        usage = data.get("usage") or {}
        return ProviderResponse(
            text=text,
            prompt_tokens=usage.get("prompt_tokens"),
            completion_tokens=usage.get("completion_tokens"),
            latency_s=latency,
        )


def build_provider(spec: ProviderSpec) -> Provider:
    if spec.kind == "playbook":
        return load_playbook(spec.playbook_path)
    if spec.kind == "http":
        return HttpProvider(spec)
    raise ValueError(f"unknown provider kind {spec.kind!r}")
