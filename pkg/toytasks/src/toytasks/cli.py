"""CLI: generate task directories and grade submissions.

`grade` prints the score in the sentinel format (`VALIDATION_METRIC: <x>`) so
its stdout can feed scoring tools directly.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

try:
    import tomllib
except ImportError:  # Python 3.10
    import tomli as tomllib

from .errors import ToyTaskError
from .generators import generate_task, task_names
from .grader import grade


def cmd_generate(args: argparse.Namespace) -> int:
    root = generate_task(args.name, args.seed, args.out)
    print(root)
    return 0


def cmd_grade(args: argparse.Namespace) -> int:
    task_dir = Path(args.task)
    meta = tomllib.loads((task_dir / "task.toml").read_text(encoding="utf-8"))
    labels = task_dir / "private" / "holdout_labels.csv"
    score = grade(args.submission, labels, meta["metric"])
    print(f"VALIDATION_METRIC: {score:.6f}")
    return 0


def cmd_list(args: argparse.Namespace) -> int:
    for name in task_names():
        print(name)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="toytasks", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="materialize a task directory")
    gen.add_argument("--name", required=True, help="one of: " + ", ".join(task_names()))
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True, help="parent directory for the task")
    gen.set_defaults(func=cmd_generate)

    gr = sub.add_parser("grade", help="score a submission, printing the sentinel line")
    gr.add_argument("--task", required=True, help="task directory (holds hidden labels)")
    gr.add_argument("--submission", required=True)
    gr.set_defaults(func=cmd_grade)

    ls = sub.add_parser("list", help="print available task names")
    ls.set_defaults(func=cmd_list)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ToyTaskError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
