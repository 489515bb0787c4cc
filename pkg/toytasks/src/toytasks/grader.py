"""Score a submission against hidden labels by ID-keyed join."""

from __future__ import annotations

import csv
import math
from pathlib import Path

from .errors import MissingRows, SchemaMismatch

METRICS = ("rmse", "accuracy")


def _read_id_value(path: Path) -> tuple[list[str], dict[str, float]]:
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatch(f"{path}: empty file") from None
        if len(header) != 2:
            raise SchemaMismatch(f"{path}: expected two columns, got {header}")
        values: dict[str, float] = {}
        for row in reader:
            if not row:
                continue
            if len(row) != 2:
                raise SchemaMismatch(f"{path}: malformed row {row}")
            key, raw = row[0].strip(), row[1].strip()
            if key in values:
                raise SchemaMismatch(f"{path}: duplicate id {key!r}")
            try:
                values[key] = float(raw)
            except ValueError:
                raise SchemaMismatch(f"{path}: non-numeric value {raw!r} for id {key!r}") from None
    return header, values


def grade(submission_file: str | Path, labels_file: str | Path, metric: str) -> float:
    """RMSE or accuracy of a submission, joined to hidden labels by row id.

    Row order does not matter; the header and the exact id set do.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    labels_header, labels = _read_id_value(labels_file)
    sub_header, predictions = _read_id_value(submission_file)
    if sub_header != labels_header:
        raise SchemaMismatch(
            f"submission header {sub_header} does not match expected {labels_header}"
        )
    missing = sorted(set(labels) - set(predictions))
    if missing:
        raise MissingRows(f"submission lacks {len(missing)} ids (first: {missing[:5]})")
    unknown = sorted(set(predictions) - set(labels))
    if unknown:
        raise SchemaMismatch(f"submission has {len(unknown)} unknown ids (first: {unknown[:5]})")

    pairs = [(predictions[key], labels[key]) for key in labels]
    if metric == "rmse":
        return math.sqrt(sum((p - t) ** 2 for p, t in pairs) / len(pairs))
    return sum(1 for p, t in pairs if p == t) / len(pairs)
