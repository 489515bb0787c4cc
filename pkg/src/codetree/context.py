"""Prompt context: a bounded digest of prior attempts and a static data preview.

Both are pure functions of their inputs. The memory summary keeps one line
per prior node, newest kept when the character budget forces elision; the
data preview digests the task input directory (row counts, column names,
small samples) without attempting real exploratory analysis.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .core import Node, SolutionTree, Stage
from .textops import first_line, last_error_line, truncate_middle

_OUTCOME_LIMIT = 200


@dataclass(frozen=True)
class MemoryEntry:
    node_id: str
    stage: Stage
    plan_digest: str
    outcome: str

    def render(self) -> str:
        return f"[{self.node_id}] {self.stage.value}: {self.plan_digest} -> {self.outcome}"


@dataclass(frozen=True)
class MemorySummary:
    """Per-node digests in creation order, within a character cap.

    ``elided`` is the count shown by the marker line; it is zero when the
    rendering has no marker (including the degenerate case of a cap too small
    for even the marker).
    """

    entries: tuple[MemoryEntry, ...]
    elided: int
    total_chars: int

    def render(self) -> str:
        lines = []
        if self.elided:
            lines.append(f"({self.elided} earlier attempts elided)")
        lines.extend(e.render() for e in self.entries)
        return "\n".join(lines)


def _entry_for(node: Node) -> MemoryEntry:
    if node.is_buggy:
        hint = last_error_line(node.execution.term_out) if node.execution else ""
        outcome = "bug: " + (hint or "(no output)")
        if len(outcome) > _OUTCOME_LIMIT:
            outcome = outcome[: _OUTCOME_LIMIT - 3] + "..."
    else:
        outcome = f"metric={node.metric.value:.6g}"
    return MemoryEntry(
        node_id=node.id,
        stage=node.stage,
        plan_digest=first_line(node.plan) or "(no plan)",
        outcome=outcome,
    )


def summarize(tree: SolutionTree, cap: int) -> MemorySummary:
    """Digest every non-root node into at most ``cap`` rendered characters.

    When over budget, oldest entries are replaced by a single
    "(k earlier attempts elided)" marker; if even that cannot fit, the
    summary is empty.
    """
    entries = [_entry_for(n) for n in tree.nodes()]
    elided = 0
    while True:
        summary = MemorySummary(tuple(entries), elided, 0)
        rendered = summary.render()
        if len(rendered) <= cap:
            return MemorySummary(tuple(entries), elided, len(rendered))
        if entries:
            entries.pop(0)
            elided += 1
        else:
            # Not even the elision marker fits: render nothing at all.
            return MemorySummary((), 0, 0)


@dataclass(frozen=True)
class FileDigest:
    name: str
    size: int
    kind: str  # tabular | text | directory | opaque
    rows: int | None = None
    columns: tuple[str, ...] = ()
    sample: tuple[str, ...] = ()


@dataclass(frozen=True)
class DataPreview:
    files: tuple[FileDigest, ...]
    text: str


_TABULAR_EXT = {".csv", ".tsv"}
_DELIMITERS = [",", "\t", ";"]


def _looks_binary(path: Path) -> bool:
    with path.open("rb") as fh:
        chunk = fh.read(1024)
    if b"\0" in chunk:
        return True
    try:
        chunk.decode("utf-8")
    except UnicodeDecodeError:
        return True
    return False


def _digest_tabular(path: Path, sample_rows: int) -> FileDigest | None:
    with path.open("r", encoding="utf-8", errors="replace") as fh:
        header = fh.readline().rstrip("\n")
        if not header:
            return None
        delim = max(_DELIMITERS, key=header.count)
        if header.count(delim) == 0:
            delim = "\t" if path.suffix == ".tsv" else ","
        columns = tuple(c.strip() for c in header.split(delim))
        sample: list[str] = []
        rows = 0
        for line in fh:
            if line.strip():
                rows += 1
                if len(sample) < sample_rows:
                    sample.append(line.rstrip("\n"))
    return FileDigest(
        name=path.name,
        size=path.stat().st_size,
        kind="tabular",
        rows=rows,
        columns=columns,
        sample=tuple(sample),
    )


def _digest_file(path: Path, sample_rows: int) -> FileDigest:
    size = path.stat().st_size
    if _looks_binary(path):
        return FileDigest(name=path.name, size=size, kind="opaque")
    if path.suffix.lower() in _TABULAR_EXT:
        digest = _digest_tabular(path, sample_rows)
        if digest is not None:
            return digest
    with path.open("r", encoding="utf-8", errors="replace") as fh:
        head = fh.read(200)
    return FileDigest(name=path.name, size=size, kind="text", sample=(head,))


def preview(input_dir: str | Path, cap: int = 4096, sample_rows: int = 5) -> DataPreview:
    """Deterministic digest of the task input directory, rendered within ``cap``."""
    root = Path(input_dir)
    if not root.is_dir():
        raise NotADirectoryError(str(root))
    digests: list[FileDigest] = []
    for entry in sorted(root.iterdir(), key=lambda p: p.name):
        if entry.is_dir():
            digests.append(
                FileDigest(name=entry.name, size=len(list(entry.iterdir())), kind="directory")
            )
        else:
            digests.append(_digest_file(entry, sample_rows))

    lines = ["Input files:"]
    if not digests:
        lines.append("(none)")
    for d in digests:
        if d.kind == "directory":
            lines.append(f"- {d.name}/ (directory, {d.size} entries)")
        elif d.kind == "tabular":
            cols = ", ".join(d.columns)
            lines.append(f"- {d.name} ({d.size} bytes, tabular): {d.rows} rows, columns: [{cols}]")
            for row in d.sample:
                lines.append(f"    {row}")
        elif d.kind == "text":
            head = d.sample[0].replace("\n", " ") if d.sample else ""
            lines.append(f"- {d.name} ({d.size} bytes, text): {head}")
        else:
            lines.append(f"- {d.name} ({d.size} bytes, opaque)")
    text = truncate_middle("\n".join(lines), cap)
    return DataPreview(files=tuple(digests), text=text)
