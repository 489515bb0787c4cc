import hashlib
from pathlib import Path

import pytest

from toytasks.errors import UnknownTask
from toytasks.generators import LEADERBOARD_SIZE, generate_task, task_names
from toytasks.grader import grade

EXPECTED_FILES = [
    "input/holdout_inputs.csv",
    "input/sample_submission.csv",
    "input/train.csv",
    "leaderboard.csv",
    "private/holdout_labels.csv",
    "task.md",
    "task.toml",
]


def tree_digest(root: Path) -> str:
    digest = hashlib.sha256()
    for path in sorted(root.rglob("*")):
        digest.update(str(path.relative_to(root)).encode())
        if path.is_file():
            digest.update(path.read_bytes())
    return digest.hexdigest()


def read_scores(path: Path) -> list[float]:
    lines = path.read_text().splitlines()[1:]
    return [float(line.split(",")[1]) for line in lines]


def test_three_tasks_registered():
    assert task_names() == ["binclass-toy", "linreg-toy", "series-toy"]


@pytest.mark.parametrize("name", ["linreg-toy", "binclass-toy", "series-toy"])
def test_emitted_structure(tmp_path, name):
    root = generate_task(name, seed=1, out_dir=tmp_path)
    files = sorted(str(p.relative_to(root)) for p in root.rglob("*") if p.is_file())
    assert files == EXPECTED_FILES
    train = (root / "input" / "train.csv").read_text().splitlines()
    holdout = (root / "input" / "holdout_inputs.csv").read_text().splitlines()
    assert len(train) == 501  # header + 500 rows
    assert len(holdout) == 101
    scores = read_scores(root / "leaderboard.csv")
    assert len(scores) == LEADERBOARD_SIZE


def test_linreg_shape_from_spec_example(tmp_path):
    root = generate_task("linreg-toy", 1, tmp_path)
    train_rows = (root / "input" / "train.csv").read_text().splitlines()[1:]
    holdout_rows = (root / "input" / "holdout_inputs.csv").read_text().splitlines()[1:]
    assert len(train_rows) == 500
    assert len(holdout_rows) == 100
    assert len(read_scores(root / "leaderboard.csv")) == 200


@pytest.mark.parametrize("name", ["linreg-toy", "binclass-toy", "series-toy"])
def test_same_seed_identical_bytes(tmp_path, name):
    a = generate_task(name, seed=7, out_dir=tmp_path / "a")
    b = generate_task(name, seed=7, out_dir=tmp_path / "b")
    assert tree_digest(a) == tree_digest(b)


def test_different_seed_differs(tmp_path):
    a = generate_task("linreg-toy", seed=1, out_dir=tmp_path / "a")
    b = generate_task("linreg-toy", seed=2, out_dir=tmp_path / "b")
    assert tree_digest(a) != tree_digest(b)


def test_unknown_name_rejected(tmp_path):
    with pytest.raises(UnknownTask):
        generate_task("no-such-task", 1, tmp_path)


def test_existing_directory_rejected(tmp_path):
    generate_task("linreg-toy", 1, tmp_path)
    with pytest.raises(FileExistsError):
        generate_task("linreg-toy", 2, tmp_path)


@pytest.mark.parametrize("name", ["linreg-toy", "binclass-toy", "series-toy"])
def test_leaderboard_sorted_best_first(tmp_path, name):
    root = generate_task(name, seed=3, out_dir=tmp_path)
    scores = read_scores(root / "leaderboard.csv")
    lower_better = "min" in (root / "task.toml").read_text()
    ordered = sorted(scores) if lower_better else sorted(scores, reverse=True)
    assert scores == ordered


@pytest.mark.parametrize("name", ["linreg-toy", "binclass-toy", "series-toy"])
def test_sample_submission_always_grades(tmp_path, name):
    root = generate_task(name, seed=5, out_dir=tmp_path)
    metric = "accuracy" if name == "binclass-toy" else "rmse"
    score = grade(
        root / "input" / "sample_submission.csv",
        root / "private" / "holdout_labels.csv",
        metric,
    )
    assert score >= 0.0


def _fit_and_grade_linear(root, feature_names, target):
    import csv

    import numpy as np

    with (root / "input" / "train.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    X = np.array([[1.0] + [float(r[f]) for f in feature_names] for r in rows])
    y = np.array([float(r[target]) for r in rows])
    w, *_ = np.linalg.lstsq(X, y, rcond=None)
    with (root / "input" / "holdout_inputs.csv").open() as fh:
        hold = list(csv.DictReader(fh))
    H = np.array([[1.0] + [float(r[f]) for f in feature_names] for r in hold])
    pred = H @ w
    return hold, pred


def test_linreg_reference_solution_ranks_above_median(tmp_path):
    import numpy as np

    root = generate_task("linreg-toy", seed=11, out_dir=tmp_path)
    hold, pred = _fit_and_grade_linear(root, ["x1", "x2", "x3"], "y")
    submission = tmp_path / "sub.csv"
    submission.write_text(
        "id,y\n" + "".join(f"{r['id']},{p:.6f}\n" for r, p in zip(hold, pred))
    )
    score = grade(submission, root / "private" / "holdout_labels.csv", "rmse")
    baseline = grade(
        root / "input" / "sample_submission.csv",
        root / "private" / "holdout_labels.csv",
        "rmse",
    )
    scores = read_scores(root / "leaderboard.csv")
    beaten = sum(1 for s in scores if score < s) / len(scores)
    assert score < baseline
    assert beaten > 0.5  # reference model must land above the synthetic median
    assert score < 0.7  # close to the generating noise level
    assert np.isfinite(score)


def test_series_reference_solution_beats_baseline(tmp_path):
    import csv

    import numpy as np

    root = generate_task("series-toy", seed=13, out_dir=tmp_path)
    with (root / "input" / "train.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    t = np.array([float(r["t"]) for r in rows])
    y = np.array([float(r["y"]) for r in rows])
    basis = lambda ts: np.column_stack(
        [np.ones_like(ts), ts, np.sin(2 * np.pi * ts / 24), np.cos(2 * np.pi * ts / 24)]
    )
    w, *_ = np.linalg.lstsq(basis(t), y, rcond=None)
    with (root / "input" / "holdout_inputs.csv").open() as fh:
        hold = list(csv.DictReader(fh))
    future = np.array([float(r["t"]) for r in hold])
    pred = basis(future) @ w
    submission = tmp_path / "sub.csv"
    submission.write_text(
        "id,y\n" + "".join(f"{r['id']},{p:.6f}\n" for r, p in zip(hold, pred))
    )
    score = grade(submission, root / "private" / "holdout_labels.csv", "rmse")
    baseline = grade(
        root / "input" / "sample_submission.csv",
        root / "private" / "holdout_labels.csv",
        "rmse",
    )
    assert score < baseline
    scores = read_scores(root / "leaderboard.csv")
    assert sum(1 for s in scores if score < s) / len(scores) > 0.5


def test_binclass_reference_solution_beats_baseline(tmp_path):
    import csv

    root = generate_task("binclass-toy", seed=17, out_dir=tmp_path)
    with (root / "input" / "holdout_inputs.csv").open() as fh:
        hold = list(csv.DictReader(fh))
    submission = tmp_path / "sub.csv"
    submission.write_text(
        "id,label\n"
        + "".join(
            f"{r['id']},{1 if float(r['f1']) + float(r['f2']) > 0 else 0}\n" for r in hold
        )
    )
    score = grade(submission, root / "private" / "holdout_labels.csv", "accuracy")
    baseline = grade(
        root / "input" / "sample_submission.csv",
        root / "private" / "holdout_labels.csv",
        "accuracy",
    )
    assert score > baseline
    scores = read_scores(root / "leaderboard.csv")
    assert sum(1 for s in scores if score > s) / len(scores) > 0.5
