"""Run one candidate program in the workspace with a deadline and output capture.

Workspace layout, fixed so prompts can state it:

    <root>/input        task data, treated as read-only
    <root>/working      scratch, wiped before every execution; holds the candidate file
    <root>/submission   where candidates write submission.csv

The child runs with the workspace root as its working directory and in its
own session, so a timeout can terminate the whole process tree.
"""

from __future__ import annotations

import logging
import os
import shlex
import shutil
import signal
import subprocess
import time
from dataclasses import dataclass
from pathlib import Path

from .core import ExecutionResult, ExitStatus, RunConfig
from .errors import SpawnError, WorkspaceError
from .textops import truncate_middle

log = logging.getLogger(__name__)

CANDIDATE_FILENAME = "solution.py"
SUBMISSION_FILENAME = "submission.csv"


@dataclass(frozen=True)
class Workspace:
    root: Path

    @property
    def input(self) -> Path:
        return self.root / "input"

    @property
    def working(self) -> Path:
        return self.root / "working"

    @property
    def submission(self) -> Path:
        return self.root / "submission"


def prepare_workspace(root: str | Path, input_source: str | Path | None = None) -> Workspace:
    """Create the three workspace directories; populate input once from a source dir."""
    ws = Workspace(Path(root))
    try:
        for directory in (ws.root, ws.input, ws.working, ws.submission):
            directory.mkdir(parents=True, exist_ok=True)
        if input_source is not None and not any(ws.input.iterdir()):
            for entry in Path(input_source).iterdir():
                target = ws.input / entry.name
                if entry.is_dir():
                    shutil.copytree(entry, target)
                else:
                    shutil.copy2(entry, target)
    except OSError as exc:
        raise WorkspaceError(f"cannot prepare workspace at {root}: {exc}") from exc
    return ws


def reset_for_node(ws: Workspace) -> None:
    """Wipe scratch and submission dirs so each candidate starts clean."""
    try:
        for directory in (ws.working, ws.submission):
            for entry in directory.iterdir():
                if entry.is_dir():
                    shutil.rmtree(entry)
                else:
                    entry.unlink()
    except OSError as exc:
        raise WorkspaceError(f"cannot reset workspace at {ws.root}: {exc}") from exc


def _terminate_tree(proc: subprocess.Popen, grace_s: float) -> None:
    # SIGTERM first so interpreters can flush tracebacks, SIGKILL after grace.
    try:
        os.killpg(proc.pid, signal.SIGTERM)
    except ProcessLookupError:
        return
    deadline = time.monotonic() + grace_s
    while time.monotonic() < deadline:
        if proc.poll() is not None:
            return
        time.sleep(0.05)
    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except ProcessLookupError:
        pass


def execute(code: str, ws: Workspace, config: RunConfig) -> ExecutionResult:
    """Write ``code`` to the scratch dir and run it under the configured interpreter.

    stdout and stderr are captured as one chronological stream, capped at
    ``config.term_out_cap`` characters with head and tail retained. Raises
    SpawnError when the interpreter command itself cannot start.
    """
    candidate = ws.working / CANDIDATE_FILENAME
    candidate.write_text(code, encoding="utf-8")
    # Absolute path: the child runs with the workspace root as its cwd.
    candidate_path = str(candidate.resolve())
    argv = [part.replace("{file}", candidate_path) for part in shlex.split(config.interpreter_command)]

    started = time.monotonic()
    try:
        proc = subprocess.Popen(
            argv,
            cwd=ws.root,
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
            stdin=subprocess.DEVNULL,
            start_new_session=True,
        )
    except OSError as exc:
        raise SpawnError(f"cannot spawn {argv[0]!r}: {exc}") from exc

    timed_out = False
    try:
        out_bytes, _ = proc.communicate(timeout=config.exec_timeout_s)
        exec_time = time.monotonic() - started
    except subprocess.TimeoutExpired:
        timed_out = True
        _terminate_tree(proc, config.timeout_grace_s)
        # The candidate's lifetime ends here; draining the pipe is not runtime.
        exec_time = time.monotonic() - started
        try:
            out_bytes, _ = proc.communicate(timeout=5.0)
        except subprocess.TimeoutExpired:
            # A detached grandchild is holding the pipe open; abandon the stream.
            proc.stdout.close()
            proc.wait(timeout=5.0)
            out_bytes = b""

    term_out = truncate_middle(out_bytes.decode("utf-8", errors="replace"), config.term_out_cap)
    if timed_out:
        status, exit_code = ExitStatus.TIMEOUT, None
    elif proc.returncode == 0:
        status, exit_code = ExitStatus.SUCCESS, 0
    else:
        status, exit_code = ExitStatus.NON_ZERO_EXIT, proc.returncode
    return ExecutionResult(
        term_out=term_out, exit_status=status, exit_code=exit_code, exec_time=exec_time
    )


def collect_submission(ws: Workspace) -> Path | None:
    """The submission file, when the candidate produced one at the documented path."""
    path = ws.submission / SUBMISSION_FILENAME
    if path.is_file():
        return path
    if path.exists():
        log.warning("submission path %s exists but is not a regular file", path)
    return None
