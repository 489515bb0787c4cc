"""Benchmark harness: holdout splits, leaderboard-quantile scoring, aggregation,
per-step code complexity, and token cost accounting.

Scoring convention: an agent placed at ``rank`` of ``total`` humans surpasses
``100 * (1 - rank/total)`` percent of them, reported at two decimals; it is
above the median exactly when that figure exceeds 50.

The complexity numbers come from a deterministic lexical pass, not a real
parser: operators are punctuation and keywords, operands are identifiers and
literals, and the cyclomatic count is one plus the number of branch keywords.
That approximation is part of the documented contract.
"""

from __future__ import annotations

import csv
import keyword
import math
import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .core import Node
from .errors import EmptyInput, FormatError, RangeError


@dataclass(frozen=True)
class LeaderboardScore:
    """One task's standing against a human leaderboard."""

    rank: int
    total_teams: int
    exceeds_percent: float
    above_median: bool

    def __post_init__(self) -> None:
        if not 1 <= self.rank <= self.total_teams:
            raise RangeError(f"rank {self.rank} outside 1..{self.total_teams}")
        exact = 100.0 * (1.0 - self.rank / self.total_teams)
        if abs(self.exceeds_percent - exact) > 0.005:
            raise RangeError(
                f"exceeds_percent {self.exceeds_percent} inconsistent with "
                f"rank {self.rank}/{self.total_teams}"
            )


def exceeds_percent(rank: int, total: int) -> float:
    """Percentage of humans surpassed, rounded to two decimals."""
    if total < 1 or not 1 <= rank <= total:
        raise RangeError(f"rank {rank} outside 1..{total}")
    return round(100.0 * (1.0 - rank / total), 2)


def rank_against(
    scores: Sequence[float], agent_score: float, lower_is_better: bool
) -> tuple[int, int]:
    """Rank = 1 + number of leaderboard entries strictly better than the agent."""
    if not scores:
        raise EmptyInput("leaderboard is empty")
    if not math.isfinite(agent_score) or any(not math.isfinite(s) for s in scores):
        raise RangeError("scores must be finite")
    if lower_is_better:
        better = sum(1 for s in scores if s < agent_score)
    else:
        better = sum(1 for s in scores if s > agent_score)
    return better + 1, len(scores)


def above_median(exceeds: float) -> bool:
    if not 0.0 <= exceeds <= 100.0:
        raise RangeError(f"exceeds value {exceeds} outside [0, 100]")
    return exceeds > 50.0


def score_against(
    scores: Sequence[float], agent_score: float, lower_is_better: bool
) -> LeaderboardScore:
    rank, total = rank_against(scores, agent_score, lower_is_better)
    exceeds = exceeds_percent(rank, total)
    return LeaderboardScore(
        rank=rank,
        total_teams=total,
        exceeds_percent=exceeds,
        above_median=above_median(exceeds),
    )


def aggregate(scores: Sequence[LeaderboardScore]) -> tuple[float, float]:
    """Mean exceeds_percent and the fraction of tasks above the median."""
    if not scores:
        raise EmptyInput("no leaderboard scores to aggregate")
    mean = sum(s.exceeds_percent for s in scores) / len(scores)
    fraction = sum(1 for s in scores if s.above_median) / len(scores)
    return mean, fraction


# ---------------------------------------------------------------------------
# Holdout splitting


@dataclass(frozen=True)
class SplitResult:
    agent_train_dir: Path
    holdout_inputs_dir: Path
    holdout_labels_file: Path


def _read_table(path: Path) -> tuple[list[str], list[list[str]]]:
    with path.open("r", encoding="utf-8", newline="") as fh:
        sample = fh.readline()
        if not sample.strip():
            raise FormatError(f"{path}: empty file")
        delim = max([",", "\t", ";"], key=sample.count)
        if sample.count(delim) == 0:
            delim = ","
        fh.seek(0)
        reader = csv.reader(fh, delimiter=delim)
        header = next(reader)
        rows = [row for row in reader if row]
    return header, rows


def split_holdout(
    dataset_dir: str | Path,
    fraction: float,
    seed: int,
    out_dir: str | Path | None = None,
    label_column: str | None = None,
) -> SplitResult:
    """Partition the single labeled table under ``dataset_dir`` into an agent
    train set and a label-stripped holdout set, deterministically per seed.

    The label column defaults to the last column. Row order within each split
    follows the original file.
    """
    if not 0.0 < fraction < 1.0:
        raise RangeError(f"fraction must be in (0, 1), got {fraction}")
    dataset_dir = Path(dataset_dir)
    tables = sorted(
        p for p in dataset_dir.iterdir() if p.suffix.lower() in (".csv", ".tsv")
    )
    if len(tables) != 1:
        raise FormatError(
            f"{dataset_dir}: expected exactly one tabular file, found {len(tables)}"
        )
    source = tables[0]
    header, rows = _read_table(source)
    if len(rows) < 2:
        raise FormatError(f"{source}: need at least 2 data rows to split")

    label = label_column if label_column is not None else header[-1]
    if label not in header:
        raise FormatError(f"{source}: no column named {label!r}")
    label_idx = header.index(label)

    indices = list(range(len(rows)))
    random.Random(seed).shuffle(indices)
    n_holdout = min(max(int(round(len(rows) * fraction)), 1), len(rows) - 1)
    holdout_idx = sorted(indices[:n_holdout])
    train_idx = sorted(indices[n_holdout:])

    out = Path(out_dir) if out_dir is not None else dataset_dir / "split"
    train_dir = out / "agent_train"
    inputs_dir = out / "holdout_inputs"
    train_dir.mkdir(parents=True, exist_ok=True)
    inputs_dir.mkdir(parents=True, exist_ok=True)

    def write_csv(path: Path, head: list[str], data: Iterable[list[str]]) -> None:
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(head)
            writer.writerows(data)

    input_header = [c for c in header if c != label]
    write_csv(train_dir / source.name, header, (rows[i] for i in train_idx))
    write_csv(
        inputs_dir / f"holdout_{source.name}",
        input_header,
        ([v for j, v in enumerate(rows[i]) if j != label_idx] for i in holdout_idx),
    )
    labels_file = out / "holdout_labels.csv"
    write_csv(labels_file, header, (rows[i] for i in holdout_idx))
    return SplitResult(train_dir, inputs_dir, labels_file)


# ---------------------------------------------------------------------------
# Code complexity


@dataclass(frozen=True)
class ComplexityRow:
    loc: int
    lloc: int
    volume: float
    n1: int
    mi: float


_KEYWORDS = frozenset(keyword.kwlist) | frozenset(getattr(keyword, "softkwlist", ()))
_BRANCH_KEYWORDS = frozenset({"if", "elif", "for", "while", "except", "and", "or", "case"})

_TOKEN = re.compile(
    r"""
      (?P<comment>\#[^\n]*)
    | (?P<string>'''(?:.|\n)*?'''|\"\"\"(?:.|\n)*?\"\"\"|"(?:\\.|[^"\\\n])*"|'(?:\\.|[^'\\\n])*')
    | (?P<number>\.\d+(?:[eE][+-]?\d+)?[jJ]?|\d[\w]*(?:\.\d*)?(?:[eE][+-]?\d+)?[jJ]?)
    | (?P<name>[A-Za-z_]\w*)
    | (?P<op>\*\*=|//=|>>=|<<=|!=|>=|<=|==|->|:=|\+=|-=|\*=|/=|%=|&=|\|=|\^=|@=|\*\*|//|>>|<<|[+\-*/%=<>!&|^~@.,:;()\[\]{}])
    """,
    re.VERBOSE,
)


def _lex(code: str) -> tuple[list[str], list[str], int]:
    """Operators, operands, and branch-keyword count, in lexical order."""
    operators: list[str] = []
    operands: list[str] = []
    branches = 0
    for match in _TOKEN.finditer(code):
        kind = match.lastgroup
        text = match.group()
        if kind == "comment":
            continue
        if kind in ("string", "number"):
            operands.append(text)
        elif kind == "name":
            if text in _KEYWORDS:
                operators.append(text)
                if text in _BRANCH_KEYWORDS:
                    branches += 1
            else:
                operands.append(text)
        else:
            operators.append(text)
    return operators, operands, branches


def complexity(code: str) -> ComplexityRow:
    """Lexical complexity metrics for one program text."""
    lines = code.splitlines()
    loc = len(lines)
    lloc = sum(1 for ln in lines if ln.strip() and not ln.strip().startswith("#"))

    operators, operands, branches = _lex(code)
    n1_total = len(operators)
    n2_total = len(operands)
    distinct = len(set(operators)) + len(set(operands))
    volume = (n1_total + n2_total) * math.log2(distinct) if distinct > 0 else 0.0

    if volume <= 0.0 or lloc == 0:
        mi = 100.0
    else:
        cc = 1 + branches
        raw = 171.0 - 5.2 * math.log(volume) - 0.23 * cc - 16.2 * math.log(lloc)
        mi = max(0.0, min(100.0, raw * 100.0 / 171.0))
    return ComplexityRow(loc=loc, lloc=lloc, volume=volume, n1=n1_total, mi=mi)


def complexity_per_step(nodes: Iterable[Node]) -> list[tuple[int, ComplexityRow]]:
    return [(node.created_step, complexity(node.code)) for node in nodes]


# ---------------------------------------------------------------------------
# Cost accounting


@dataclass(frozen=True)
class StepCost:
    step: int
    prompt_tokens: int
    completion_tokens: int


@dataclass(frozen=True)
class CostRecord:
    """Token usage per step and the resulting spend at the given unit prices."""

    steps: tuple[StepCost, ...]
    price_in: float
    price_out: float
    total: float
    missing_steps: tuple[int, ...]


def cost(nodes: Iterable[Node], price_in: float, price_out: float) -> CostRecord:
    """Sum per-step token spend; steps without counts are flagged and excluded."""
    steps: list[StepCost] = []
    missing: list[int] = []
    total = 0.0
    for node in nodes:
        if node.prompt_tokens is None or node.completion_tokens is None:
            missing.append(node.created_step)
            continue
        steps.append(StepCost(node.created_step, node.prompt_tokens, node.completion_tokens))
        total += node.prompt_tokens * price_in + node.completion_tokens * price_out
    return CostRecord(
        steps=tuple(steps),
        price_in=price_in,
        price_out=price_out,
        total=total,
        missing_steps=tuple(missing),
    )


# ---------------------------------------------------------------------------
# File formats used by the CLI


def read_leaderboard(path: str | Path) -> list[float]:
    """Parse a leaderboard file: one score per line, optionally 'team,score'.

    Fields may be separated by comma or tab; the score is the last field. A
    single non-numeric first line is tolerated as a header.
    """
    scores: list[float] = []
    lines = [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines()]
    for lineno, line in enumerate(lines):
        if not line:
            continue
        field = re.split(r"[,\t]", line)[-1].strip()
        try:
            scores.append(float(field))
        except ValueError:
            if lineno == 0:
                continue  # header
            raise FormatError(f"{path}:{lineno + 1}: not a score: {line!r}") from None
    if not scores:
        raise FormatError(f"{path}: no scores found")
    return scores


def read_score_file(path: str | Path) -> float:
    """Read the agent's scalar score: a bare number, or sentinel lines
    ("VALIDATION_METRIC: x", last one wins) as emitted by graders."""
    from .review import SENTINEL_RE

    text = Path(path).read_text(encoding="utf-8")
    sentinels = SENTINEL_RE.findall(text)
    candidate = sentinels[-1] if sentinels else text.strip()
    try:
        value = float(candidate)
    except ValueError:
        raise FormatError(f"{path}: no usable score in file") from None
    if not math.isfinite(value):
        raise FormatError(f"{path}: score is not finite")
    return value
