"""Correlation of automated metric scores with human evaluation scores.

Human scores arrive as JSONL records
``{"id": str, "image_quality": real, "consistency": real, "overall": real}``
and are paired with the automated scores dimension by dimension: the two
image metrics (averaged) face the human image-quality score, the two
consistency metrics (averaged) face the human consistency score, and the
per-sample mean faces the human overall score.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DegenerateInput, IOFailure, SchemaError
from .evaluator import CorpusReport

log = logging.getLogger(__name__)

HUMAN_DIMENSIONS = ("image_quality", "consistency", "overall")


@dataclass
class PairedScores:
    """Sample-aligned automated and human score vectors for one dimension."""

    sample_ids: list[str]
    metric_values: list[float]
    human_values: list[float]


@dataclass
class CorrelationRow:
    dimension: str
    pearson: float | None
    spearman: float | None
    n: int
    error: str | None = None


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient."""
    if len(x) != len(y):
        raise DegenerateInput(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise DegenerateInput("need at least 2 paired values")
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    denom = math.sqrt(float(dx @ dx) * float(dy @ dy))
    if denom == 0.0:
        raise DegenerateInput("correlation is undefined for constant input")
    return float(dx @ dy) / denom


def ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks with ties receiving the average of their positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    result = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg_rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            result[order[k]] = avg_rank
        i = j + 1
    return result


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson coefficient of the rank vectors, with average ranks for ties."""
    if len(x) != len(y):
        raise DegenerateInput(f"length mismatch: {len(x)} vs {len(y)}")
    return pearson(ranks(x), ranks(y))


def load_human_scores(path: str | Path) -> dict[str, dict[str, float]]:
    """Load per-sample human scores keyed by sample id."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IOFailure(f"cannot read human scores {path}: {exc}") from exc
    scores: dict[str, dict[str, float]] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg}", line_no) from exc
        if not isinstance(record, dict) or not isinstance(record.get("id"), str):
            raise SchemaError("record must be an object with a string 'id'", line_no)
        row: dict[str, float] = {}
        for dim in HUMAN_DIMENSIONS:
            value = record.get(dim)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise SchemaError(f"field {dim!r} must be a number", line_no)
            row[dim] = float(value)
        scores[record["id"]] = row
    return scores


def _automated_value(report_row, dimension: str) -> float:
    if dimension == "image_quality":
        return (report_row.edit_distance + report_row.kendall) / 2
    if dimension == "consistency":
        return (report_row.alignment + report_row.clip) / 2
    return report_row.mean


def pair_scores(
    report: CorpusReport, human: dict[str, dict[str, float]], dimension: str
) -> PairedScores:
    """Align automated values against human scores for one dimension."""
    overlap = [row for row in report.per_sample if row.sample_id in human]
    return PairedScores(
        sample_ids=[r.sample_id for r in overlap],
        metric_values=[_automated_value(r, dimension) for r in overlap],
        human_values=[human[r.sample_id][dimension] for r in overlap],
    )


def correlate_with_human(
    report: CorpusReport, human: dict[str, dict[str, float]]
) -> list[CorrelationRow]:
    """Pearson and Spearman per dimension over the overlapping samples.

    Samples missing from either side are dropped (with a logged count); a
    degenerate dimension yields an error row without aborting the others.
    """
    report_ids = {row.sample_id for row in report.per_sample}
    overlap_count = sum(1 for sample_id in human if sample_id in report_ids)
    dropped = (len(report.per_sample) - overlap_count) + (len(human) - overlap_count)
    if dropped:
        log.info("dropped %d samples present on only one side", dropped)

    rows: list[CorrelationRow] = []
    for dimension in HUMAN_DIMENSIONS:
        paired = pair_scores(report, human, dimension)
        try:
            rows.append(
                CorrelationRow(
                    dimension=dimension,
                    pearson=pearson(paired.metric_values, paired.human_values),
                    spearman=spearman(paired.metric_values, paired.human_values),
                    n=len(paired.sample_ids),
                )
            )
        except DegenerateInput as exc:
            rows.append(
                CorrelationRow(
                    dimension=dimension,
                    pearson=None,
                    spearman=None,
                    n=len(paired.sample_ids),
                    error=str(exc),
                )
            )
    return rows
