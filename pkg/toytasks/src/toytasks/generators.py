"""Task generators: tiny competition-style datasets with hidden labels.

Every task directory looks the same:

    <name>/
      task.md                     goal, files, metric, submission format
      task.toml                   direction, metric name
      input/train.csv             labeled training rows for the agent
      input/holdout_inputs.csv    rows to predict (no label column)
      input/sample_submission.csv valid constant-baseline submission
      private/holdout_labels.csv  hidden labels, used only by the grader
      leaderboard.csv             ~200 synthetic human scores, best first

Leaderboard scores are drawn uniformly between a near-optimal bound and the
constant-baseline score, so a real model lands near the top while the
baseline lands at the bottom. Everything is a pure function of (name, seed).
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .errors import UnknownTask

LEADERBOARD_SIZE = 200


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def _write_leaderboard(path: Path, rng, low: float, high: float, lower_is_better: bool) -> None:
    scores = rng.uniform(low, high, size=LEADERBOARD_SIZE)
    ordered = np.sort(scores) if lower_is_better else np.sort(scores)[::-1]
    rows = ([f"team_{i:03d}", _fmt(s)] for i, s in enumerate(ordered, start=1))
    _write_csv(path, ["team", "score"], rows)


def _write_meta(root: Path, name: str, direction: str, metric: str, description: str) -> None:
    (root / "task.md").write_text(description, encoding="utf-8")
    (root / "task.toml").write_text(
        f'name = "{name}"\ndirection = "{direction}"\nmetric = "{metric}"\n',
        encoding="utf-8",
    )


_TASK_MD = """\
# {title}

{goal}

## Files

- `input/train.csv` - labeled training data{train_cols}
- `input/holdout_inputs.csv` - rows to predict (same columns, no `{target}`)
- `input/sample_submission.csv` - a valid submission in the correct format

## Submission

Write `submission/submission.csv` with header `{sub_header}`, one row per id
in `holdout_inputs.csv`.

## Metric

{metric_line} Hold out part of the training data yourself, evaluate on it,
and print the result as a line `VALIDATION_METRIC: <number>`.
"""


def _gen_linreg(root: Path, seed: int) -> None:
    rng = np.random.default_rng(seed)
    n_train, n_holdout = 500, 100
    total = n_train + n_holdout
    x = rng.uniform(-2.0, 2.0, size=(total, 3))
    noise = rng.normal(0.0, 0.5, size=total)
    y = 1.0 + 3.0 * x[:, 0] - 2.0 * x[:, 1] + 0.5 * x[:, 2] + noise
    ids = np.arange(1, total + 1)

    train_y = y[:n_train]
    hold_y = y[n_train:]
    (root / "input").mkdir(parents=True)
    (root / "private").mkdir()
    _write_csv(
        root / "input" / "train.csv",
        ["id", "x1", "x2", "x3", "y"],
        (
            [str(ids[i]), _fmt(x[i, 0]), _fmt(x[i, 1]), _fmt(x[i, 2]), _fmt(y[i])]
            for i in range(n_train)
        ),
    )
    _write_csv(
        root / "input" / "holdout_inputs.csv",
        ["id", "x1", "x2", "x3"],
        (
            [str(ids[i]), _fmt(x[i, 0]), _fmt(x[i, 1]), _fmt(x[i, 2])]
            for i in range(n_train, total)
        ),
    )
    _write_csv(
        root / "private" / "holdout_labels.csv",
        ["id", "y"],
        ([str(ids[n_train + j]), _fmt(hold_y[j])] for j in range(n_holdout)),
    )
    mean_pred = float(train_y.mean())
    _write_csv(
        root / "input" / "sample_submission.csv",
        ["id", "y"],
        ([str(ids[n_train + j]), _fmt(mean_pred)] for j in range(n_holdout)),
    )
    baseline_rmse = float(np.sqrt(np.mean((hold_y - mean_pred) ** 2)))
    _write_leaderboard(root / "leaderboard.csv", rng, 0.55, baseline_rmse, lower_is_better=True)
    _write_meta(
        root,
        "linreg-toy",
        direction="min",
        metric="rmse",
        description=_TASK_MD.format(
            title="Toy tabular regression",
            goal="Predict the numeric target `y` from three features `x1, x2, x3`. "
            "The relationship is close to linear with additive noise.",
            train_cols=" (columns `id,x1,x2,x3,y`)",
            target="y",
            sub_header="id,y",
            metric_line="Submissions are scored by RMSE against hidden labels; lower is better.",
        ),
    )


def _gen_binclass(root: Path, seed: int) -> None:
    rng = np.random.default_rng(seed)
    n_train, n_holdout = 500, 100
    total = n_train + n_holdout
    labels = np.array([0, 1]).repeat(total // 2)
    rng.shuffle(labels)
    centers = np.where(labels[:, None] == 1, 1.0, -1.0)
    x = centers + rng.normal(0.0, 0.8, size=(total, 2))
    ids = np.arange(1, total + 1)

    (root / "input").mkdir(parents=True)
    (root / "private").mkdir()
    _write_csv(
        root / "input" / "train.csv",
        ["id", "f1", "f2", "label"],
        (
            [str(ids[i]), _fmt(x[i, 0]), _fmt(x[i, 1]), str(labels[i])]
            for i in range(n_train)
        ),
    )
    _write_csv(
        root / "input" / "holdout_inputs.csv",
        ["id", "f1", "f2"],
        ([str(ids[i]), _fmt(x[i, 0]), _fmt(x[i, 1])] for i in range(n_train, total)),
    )
    _write_csv(
        root / "private" / "holdout_labels.csv",
        ["id", "label"],
        ([str(ids[n_train + j]), str(labels[n_train + j])] for j in range(n_holdout)),
    )
    majority = int(np.bincount(labels[:n_train]).argmax())
    _write_csv(
        root / "input" / "sample_submission.csv",
        ["id", "label"],
        ([str(ids[n_train + j]), str(majority)] for j in range(n_holdout)),
    )
    # centroid rule = the intended reference solution; leaderboard sits below it
    hold_x, hold_y = x[n_train:], labels[n_train:]
    predicted = (hold_x.sum(axis=1) > 0).astype(int)
    achievable = float((predicted == hold_y).mean())
    baseline = float((hold_y == majority).mean())
    _write_leaderboard(
        root / "leaderboard.csv",
        rng,
        min(baseline, achievable - 0.35),
        achievable - 0.03,
        lower_is_better=False,
    )
    _write_meta(
        root,
        "binclass-toy",
        direction="max",
        metric="accuracy",
        description=_TASK_MD.format(
            title="Toy tabular classification",
            goal="Predict the binary `label` (0 or 1) from two features `f1, f2`. "
            "The classes form two noisy clusters.",
            train_cols=" (columns `id,f1,f2,label`)",
            target="label",
            sub_header="id,label",
            metric_line="Submissions are scored by accuracy against hidden labels; higher is better.",
        ),
    )


def _gen_series(root: Path, seed: int) -> None:
    rng = np.random.default_rng(seed)
    n_train, n_holdout = 500, 100
    total = n_train + n_holdout
    t = np.arange(total)
    y = 0.01 * t + 2.0 * np.sin(2.0 * math.pi * t / 24.0) + rng.normal(0.0, 0.4, size=total)

    (root / "input").mkdir(parents=True)
    (root / "private").mkdir()
    _write_csv(
        root / "input" / "train.csv",
        ["id", "t", "y"],
        ([str(i), str(i), _fmt(y[i])] for i in range(n_train)),
    )
    _write_csv(
        root / "input" / "holdout_inputs.csv",
        ["id", "t"],
        ([str(i), str(i)] for i in range(n_train, total)),
    )
    _write_csv(
        root / "private" / "holdout_labels.csv",
        ["id", "y"],
        ([str(i), _fmt(y[i])] for i in range(n_train, total)),
    )
    mean_pred = float(y[:n_train].mean())
    _write_csv(
        root / "input" / "sample_submission.csv",
        ["id", "y"],
        ([str(i), _fmt(mean_pred)] for i in range(n_train, total)),
    )
    baseline_rmse = float(np.sqrt(np.mean((y[n_train:] - mean_pred) ** 2)))
    _write_leaderboard(root / "leaderboard.csv", rng, 0.45, baseline_rmse, lower_is_better=True)
    _write_meta(
        root,
        "series-toy",
        direction="min",
        metric="rmse",
        description=_TASK_MD.format(
            title="Toy time-series forecasting",
            goal="Forecast the future values of `y` given its past. The series has a "
            "linear trend plus a 24-step seasonal cycle. Train rows cover times 0-499; "
            "predict times 500-599.",
            train_cols=" (columns `id,t,y`, where `t` is the time index)",
            target="y",
            sub_header="id,y",
            metric_line="Submissions are scored by RMSE against hidden labels; lower is better.",
        ),
    )


GENERATORS = {
    "linreg-toy": _gen_linreg,
    "binclass-toy": _gen_binclass,
    "series-toy": _gen_series,
}


def task_names() -> list[str]:
    return sorted(GENERATORS)


def generate_task(name: str, seed: int, out_dir: str | Path) -> Path:
    """Materialize task ``name`` under ``out_dir``; byte-identical per (name, seed)."""
    if name not in GENERATORS:
        raise UnknownTask(f"unknown task {name!r}; available: {', '.join(task_names())}")
    root = Path(out_dir) / name
    if root.exists():
        raise FileExistsError(f"{root} already exists")
    root.mkdir(parents=True)
    GENERATORS[name](root, seed)
    return root
