"""Command line surface.

Exit codes: 0 run finished with a scored solution, 2 run finished but every
node was buggy, 3 configuration or input error, 4 provider failure. Flag
errors are reported before any side effect.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path
from typing import Any

try:
    import tomllib
except ImportError:  # Python 3.10
    import tomli as tomllib

from . import agent, bench, journal, viz
from .core import ProviderSpec, RunConfig
from .errors import (
    AuthError,
    CodeTreeError,
    ContractViolation,
    EmptyResponse,
    PlaybookMismatch,
    ProviderUnavailable,
)
from .provider import build_provider

EXIT_OK = 0
EXIT_ALL_BUGGY = 2
EXIT_CONFIG = 3
EXIT_PROVIDER = 4

_PROVIDER_FAILURES = (
    ProviderUnavailable,
    AuthError,
    ContractViolation,
    PlaybookMismatch,
    EmptyResponse,
)


class _Parser(argparse.ArgumentParser):
    # Usage errors must exit 3, not argparse's default 2 (which means all-buggy here).
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _pick(*values: Any, default: Any = None) -> Any:
    for value in values:
        if value is not None:
            return value
    return default


def _load_config_file(path: str | None) -> dict[str, Any]:
    if not path:
        return {}
    return tomllib.loads(Path(path).read_text(encoding="utf-8"))


def _provider_spec(args: argparse.Namespace, file_cfg: dict[str, Any]) -> ProviderSpec:
    section = file_cfg.get("provider", {})
    choice = _pick(args.provider, section.get("kind"), default="http")
    if choice.startswith("playbook:"):
        return ProviderSpec(kind="playbook", playbook_path=choice.split(":", 1)[1])
    if choice == "playbook":
        path = section.get("playbook_path", "")
        if not path:
            raise CodeTreeError("playbook provider needs playbook:<file>")
        return ProviderSpec(kind="playbook", playbook_path=path)
    if choice != "http":
        raise CodeTreeError(f"unknown provider {choice!r} (use http or playbook:<file>)")
    endpoint = _pick(args.endpoint, section.get("endpoint"), default="")
    if not endpoint:
        raise CodeTreeError("http provider needs --endpoint (or [provider].endpoint)")
    return ProviderSpec(
        kind="http",
        endpoint=endpoint,
        model=_pick(args.model, section.get("model"), default=""),
        api_key_env=_pick(section.get("api_key_env"), default="CODETREE_API_KEY"),
        max_retries=int(_pick(section.get("max_retries"), default=3)),
        backoff_s=float(_pick(section.get("backoff_s"), default=0.5)),
        request_timeout_s=float(_pick(section.get("request_timeout_s"), default=120.0)),
    )


def _run_config(args: argparse.Namespace, file_cfg: dict[str, Any]) -> RunConfig:
    section = file_cfg.get("run", {})
    out = Path(args.out)
    workspace = _pick(
        args.workspace,
        section.get("workspace"),
        default=str(out.parent / f"{out.stem}_workspace"),
    )
    return RunConfig(
        num_drafts=int(_pick(args.drafts, section.get("drafts"), default=5)),
        debug_depth_limit=int(_pick(args.debug_depth, section.get("debug_depth"), default=3)),
        max_steps=int(_pick(args.steps, section.get("steps"), default=20)),
        time_budget_s=_pick(args.time_budget, section.get("time_budget")),
        exec_timeout_s=float(_pick(args.timeout, section.get("timeout"), default=600.0)),
        interpreter_command=_pick(
            args.interpreter, section.get("interpreter"), default=agent._default_interpreter()
        ),
        workspace_dir=str(workspace),
        task_dir=str(args.task),
        provider=_provider_spec(args, file_cfg),
    )


def cmd_run(args: argparse.Namespace) -> int:
    file_cfg = _load_config_file(args.config)
    config = _run_config(args, file_cfg)
    task = agent.load_task(args.task)
    provider = build_provider(config.provider)
    best, tree = agent.run(task, config, provider, journal_path=args.out)
    if best is None:
        print(f"no working solution after {len(tree)} nodes; journal: {args.out}")
        return EXIT_ALL_BUGGY
    print(
        f"best node {best.id} (step {best.created_step}): metric {best.metric.value:g}"
        f" | journal: {args.out}"
    )
    return EXIT_OK


def cmd_resume(args: argparse.Namespace) -> int:
    best, tree = agent.resume(args.journal)
    if best is None:
        print(f"no working solution after {len(tree)} nodes")
        return EXIT_ALL_BUGGY
    print(f"best node {best.id} (step {best.created_step}): metric {best.metric.value:g}")
    return EXIT_OK


def cmd_bench_split(args: argparse.Namespace) -> int:
    result = bench.split_holdout(
        args.data, args.fraction, args.seed, out_dir=args.out, label_column=args.label
    )
    print(f"agent train:    {result.agent_train_dir}")
    print(f"holdout inputs: {result.holdout_inputs_dir}")
    print(f"holdout labels: {result.holdout_labels_file}")
    return EXIT_OK


def cmd_bench_score(args: argparse.Namespace) -> int:
    scores = bench.read_leaderboard(args.leaderboard)
    agent_score = bench.read_score_file(args.submission)
    result = bench.score_against(scores, agent_score, args.direction == "min")
    print(
        f"rank {result.rank} of {result.total_teams}"
        f" | exceeds {result.exceeds_percent:.2f}%"
        f" | above median: {'yes' if result.above_median else 'no'}"
    )
    if args.out:
        Path(args.out).write_text(
            json.dumps(dataclasses.asdict(result), indent=2) + "\n", encoding="utf-8"
        )
    return EXIT_OK


def cmd_bench_aggregate(args: argparse.Namespace) -> int:
    scores = []
    for path in args.scores:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        scores.append(bench.LeaderboardScore(**data))
    mean, fraction = bench.aggregate(scores)
    print(f"tasks: {len(scores)}")
    print(f"mean exceeds: {mean:.2f}%")
    print(f"above median: {100.0 * fraction:.2f}%")
    return EXIT_OK


def cmd_analyze_complexity(args: argparse.Namespace) -> int:
    tree, _ = journal.read_journal(args.journal)
    rows = bench.complexity_per_step(tree.nodes())
    if args.json:
        payload = [
            {"step": step, **dataclasses.asdict(row)} for step, row in rows
        ]
        print(json.dumps(payload, indent=2))
        return EXIT_OK
    print(f"{'step':>4}  {'loc':>5}  {'lloc':>5}  {'volume':>10}  {'n1':>5}  {'mi':>6}")
    for step, row in rows:
        print(
            f"{step:>4}  {row.loc:>5}  {row.lloc:>5}  {row.volume:>10.2f}"
            f"  {row.n1:>5}  {row.mi:>6.2f}"
        )
    return EXIT_OK


def cmd_analyze_cost(args: argparse.Namespace) -> int:
    tree, _ = journal.read_journal(args.journal)
    record = bench.cost(tree.nodes(), args.price_in, args.price_out)
    if args.json:
        print(json.dumps(dataclasses.asdict(record), indent=2))
        return EXIT_OK
    for step in record.steps:
        spend = step.prompt_tokens * record.price_in + step.completion_tokens * record.price_out
        print(
            f"step {step.step}: {step.prompt_tokens} prompt"
            f" + {step.completion_tokens} completion tokens = {spend:.6f}"
        )
    if record.missing_steps:
        print(f"steps without token counts (excluded): {list(record.missing_steps)}")
    print(f"total: {record.total:.6f}")
    return EXIT_OK


def cmd_export_tree(args: argparse.Namespace) -> int:
    tree, _ = journal.read_journal(args.journal)
    rendered = viz.to_dot(tree) if args.format == "dot" else viz.to_json(tree)
    if args.out:
        Path(args.out).write_text(rendered, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(rendered)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="codetree", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run the agent loop on a task directory")
    run.add_argument("--task", required=True, help="task directory (task.md, task.toml, input/)")
    run.add_argument("--out", required=True, help="journal file to write")
    run.add_argument("--steps", type=int, help="loop budget N")
    run.add_argument("--drafts", type=int, help="initial solutions before debugging/improving")
    run.add_argument("--debug-depth", type=int, help="max consecutive debug attempts")
    run.add_argument("--timeout", type=float, help="per-candidate execution timeout (s)")
    run.add_argument("--time-budget", type=float, help="overall run budget (s)")
    run.add_argument("--provider", help="http or playbook:<file>")
    run.add_argument("--endpoint", help="chat-completions endpoint URL")
    run.add_argument("--model", help="model name sent to the provider")
    run.add_argument("--interpreter", help="command template with {file} placeholder")
    run.add_argument("--workspace", help="workspace root (default: derived from --out)")
    run.add_argument("--config", help="TOML config file ([run] and [provider] sections)")
    run.set_defaults(func=cmd_run)

    resume = sub.add_parser("resume", help="continue a journaled run")
    resume.add_argument("--journal", required=True)
    resume.set_defaults(func=cmd_resume)

    bench_cmd = sub.add_parser("bench", help="holdout splits and leaderboard scoring")
    bench_sub = bench_cmd.add_subparsers(dest="bench_command", required=True, parser_class=_Parser)

    split = bench_sub.add_parser("split", help="split a dataset into train and holdout")
    split.add_argument("--data", required=True)
    split.add_argument("--fraction", type=float, required=True)
    split.add_argument("--seed", type=int, required=True)
    split.add_argument("--out", help="output directory (default <data>/split)")
    split.add_argument("--label", help="label column (default: last column)")
    split.set_defaults(func=cmd_bench_split)

    score = bench_sub.add_parser("score", help="rank an agent score against a leaderboard")
    score.add_argument("--leaderboard", required=True)
    score.add_argument(
        "--submission",
        required=True,
        help="score file: a bare number or VALIDATION_METRIC lines",
    )
    score.add_argument("--direction", choices=("min", "max"), required=True)
    score.add_argument("--out", help="also write the score as JSON")
    score.set_defaults(func=cmd_bench_score)

    agg = bench_sub.add_parser("aggregate", help="average score JSON files across tasks")
    agg.add_argument("--scores", nargs="+", required=True)
    agg.set_defaults(func=cmd_bench_aggregate)

    analyze = sub.add_parser("analyze", help="journal analyses")
    analyze_sub = analyze.add_subparsers(dest="analyze_command", required=True, parser_class=_Parser)

    comp = analyze_sub.add_parser("complexity", help="per-step code complexity")
    comp.add_argument("--journal", required=True)
    comp.add_argument("--json", action="store_true")
    comp.set_defaults(func=cmd_analyze_complexity)

    cost = analyze_sub.add_parser("cost", help="token spend per step")
    cost.add_argument("--journal", required=True)
    cost.add_argument("--price-in", type=float, required=True, help="currency per prompt token")
    cost.add_argument("--price-out", type=float, required=True, help="currency per completion token")
    cost.add_argument("--json", action="store_true")
    cost.set_defaults(func=cmd_analyze_cost)

    export = sub.add_parser("export", help="export artifacts from a journal")
    export_sub = export.add_subparsers(dest="export_command", required=True, parser_class=_Parser)
    tree = export_sub.add_parser("tree", help="solution tree as dot or json")
    tree.add_argument("--journal", required=True)
    tree.add_argument("--format", choices=("dot", "json"), required=True)
    tree.add_argument("--out")
    tree.set_defaults(func=cmd_export_tree)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except _PROVIDER_FAILURES as exc:
        print(f"provider failure: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except (CodeTreeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
