"""Per-sample scoring pipeline, corpus aggregation, and report emission.

Each sample is scored on five 0-100 metrics (rouge1, edit_distance, kendall,
alignment, clip) plus their unweighted mean. An invalid-format answer scores
zero on the image and consistency metrics while text quality is still
computed on whatever prose parsed. Corpus aggregates are arithmetic means
over samples.
"""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from .consistency import alignment_score, clip_score
from .corpus import EvalSample
from .errors import EmptyCorpus, InvariantError, IOFailure, SchemaError
from .parsing import (
    FailureFlags,
    extract_contexts,
    extract_image_sequence,
    parse_answer,
    strip_markup,
)
from .providers import ScoringProvider
from .seqmetrics import correct_subsequence, edit_distance_score, kendall_score
from .textmetrics import rouge, tokenize

log = logging.getLogger(__name__)

METRIC_FIELDS = ("rouge1", "edit_distance", "kendall", "alignment", "clip")


@dataclass
class EvalConfig:
    """Knobs of the scoring pipeline."""

    context_window_cap: int = 500


@dataclass
class SampleReport:
    sample_id: str
    rouge1: float
    edit_distance: float
    kendall: float
    alignment: float
    clip: float
    mean: float
    flags: FailureFlags = field(default_factory=FailureFlags)

    def metric(self, name: str) -> float:
        if name == "mean":
            return self.mean
        if name not in METRIC_FIELDS:
            raise KeyError(name)
        return getattr(self, name)


@dataclass
class CorpusReport:
    per_sample: list[SampleReport]
    aggregates: dict[str, float]
    invalid_format_count: int
    hallucination_count: int


def evaluate_sample(
    sample: EvalSample,
    answer_markdown: str,
    provider: ScoringProvider,
    config: EvalConfig | None = None,
) -> SampleReport:
    """Score one answer against its sample's ground truth."""
    config = config or EvalConfig()
    n = sample.image_count
    answer = parse_answer(answer_markdown, n)
    truth = parse_answer(sample.ground_truth, n)

    candidate = tokenize(strip_markup(answer_markdown), source_kind="candidate")
    reference = tokenize(strip_markup(sample.ground_truth), source_kind="reference")
    rouge1 = 100.0 * rouge(candidate, reference, "rouge1").f1

    if answer.flags.invalid_format:
        edit = kendall = alignment = clip = 0.0
    else:
        generated = extract_image_sequence(answer, dedupe=True)
        expected = extract_image_sequence(truth, dedupe=True)
        edit = 100.0 * edit_distance_score(generated, expected)
        kendall = 100.0 * kendall_score(generated, expected)
        correct = correct_subsequence(generated, expected)
        gen_contexts = extract_contexts(answer, config.context_window_cap)
        gt_contexts = extract_contexts(truth, config.context_window_cap)
        alignment = alignment_score(gen_contexts, gt_contexts, correct, provider)
        clip = clip_score(answer, gen_contexts, sample.assets(), provider)

    scores = (rouge1, edit, kendall, alignment, clip)
    return SampleReport(
        sample_id=sample.id,
        rouge1=rouge1,
        edit_distance=edit,
        kendall=kendall,
        alignment=alignment,
        clip=clip,
        mean=sum(scores) / len(scores),
        flags=answer.flags,
    )


def evaluate_corpus(
    samples: list[EvalSample],
    answers: dict[str, str],
    provider: ScoringProvider,
    config: EvalConfig | None = None,
    workers: int = 1,
) -> CorpusReport:
    """Evaluate every (sample, answer) pair and aggregate.

    Answer ids must all match corpus samples; corpus samples without an
    answer are skipped with a log message. Samples are scored concurrently
    up to ``workers``; aggregation order is independent of completion order.
    """
    by_id = {sample.id: sample for sample in samples}
    unknown = [answer_id for answer_id in answers if answer_id not in by_id]
    if unknown:
        raise InvariantError("answer id not in corpus", sample_id=unknown[0])
    pairs = [(sample, answers[sample.id]) for sample in samples if sample.id in answers]
    skipped = len(samples) - len(pairs)
    if skipped:
        log.info("skipping %d corpus samples without answers", skipped)

    if workers <= 1 or len(pairs) <= 1:
        reports = [
            evaluate_sample(sample, answer, provider, config)
            for sample, answer in pairs
        ]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(
                pool.map(
                    lambda pair: evaluate_sample(pair[0], pair[1], provider, config),
                    pairs,
                )
            )
    return aggregate(reports)


def aggregate(reports: list[SampleReport]) -> CorpusReport:
    """Fold sample reports into a corpus report, ordered by sample id."""
    if not reports:
        raise EmptyCorpus("no sample reports to aggregate")
    ordered = sorted(reports, key=lambda r: r.sample_id)
    count = len(ordered)
    aggregates = {
        name: sum(r.metric(name) for r in ordered) / count
        for name in METRIC_FIELDS + ("mean",)
    }
    return CorpusReport(
        per_sample=ordered,
        aggregates=aggregates,
        invalid_format_count=sum(1 for r in ordered if r.flags.invalid_format),
        hallucination_count=sum(1 for r in ordered if r.flags.hallucinated_indices),
    )


def _round2(value: float) -> float:
    return float(Decimal(repr(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _sample_row(report: SampleReport) -> dict:
    return {
        "sample_id": report.sample_id,
        **{name: _round2(report.metric(name)) for name in METRIC_FIELDS},
        "mean": _round2(report.mean),
        "flags": {
            "invalid_format": report.flags.invalid_format,
            "hallucinated_indices": list(report.flags.hallucinated_indices),
        },
    }


def emit_report(report: CorpusReport, format: str, path: str | Path) -> None:
    """Write a corpus report with 2-decimal (half-up) numbers.

    JSON carries the full structure and round-trips through ``load_report``.
    CSV has one row per sample plus a trailing ``aggregate`` row whose flag
    columns hold the invalid-format and hallucination counts.
    """
    if format not in ("json", "csv"):
        raise ValueError(f"unsupported report format {format!r}")
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            if format == "json":
                payload = {
                    "per_sample": [_sample_row(r) for r in report.per_sample],
                    "aggregates": {
                        name: _round2(value)
                        for name, value in report.aggregates.items()
                    },
                    "invalid_format_count": report.invalid_format_count,
                    "hallucination_count": report.hallucination_count,
                }
                json.dump(payload, handle, ensure_ascii=False, indent=2)
                handle.write("\n")
            else:
                writer = csv.writer(handle)
                header = ["sample_id", *METRIC_FIELDS, "mean", "invalid_format",
                          "hallucinated_indices"]
                writer.writerow(header)
                for r in report.per_sample:
                    writer.writerow(
                        [
                            r.sample_id,
                            *(f"{_round2(r.metric(m)):.2f}" for m in METRIC_FIELDS),
                            f"{_round2(r.mean):.2f}",
                            str(r.flags.invalid_format).lower(),
                            ";".join(map(str, r.flags.hallucinated_indices)),
                        ]
                    )
                writer.writerow(
                    [
                        "aggregate",
                        *(
                            f"{_round2(report.aggregates[m]):.2f}"
                            for m in METRIC_FIELDS
                        ),
                        f"{_round2(report.aggregates['mean']):.2f}",
                        str(report.invalid_format_count),
                        str(report.hallucination_count),
                    ]
                )
    except OSError as exc:
        raise IOFailure(f"cannot write report {path}: {exc}") from exc


def load_report(path: str | Path) -> CorpusReport:
    """Read back a JSON report written by ``emit_report``."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise IOFailure(f"cannot read report {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"report {path} is not valid JSON: {exc.msg}") from exc
    try:
        per_sample = [
            SampleReport(
                sample_id=row["sample_id"],
                **{name: float(row[name]) for name in METRIC_FIELDS},
                mean=float(row["mean"]),
                flags=FailureFlags(
                    invalid_format=row["flags"]["invalid_format"],
                    hallucinated_indices=list(row["flags"]["hallucinated_indices"]),
                ),
            )
            for row in data["per_sample"]
        ]
        return CorpusReport(
            per_sample=per_sample,
            aggregates={k: float(v) for k, v in data["aggregates"].items()},
            invalid_format_count=int(data["invalid_format_count"]),
            hallucination_count=int(data["hallucination_count"]),
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"report {path} has unexpected structure: {exc}") from exc


def load_answers(path: str | Path) -> dict[str, str]:
    """Load an answers JSONL file ({"id": str, "answer": str} per line)."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IOFailure(f"cannot read answers {path}: {exc}") from exc
    answers: dict[str, str] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg}", line_no) from exc
        if (
            not isinstance(record, dict)
            or not isinstance(record.get("id"), str)
            or not isinstance(record.get("answer"), str)
        ):
            raise SchemaError('record must be {"id": str, "answer": str}', line_no)
        if record["id"] in answers:
            raise SchemaError(f"duplicate answer id {record['id']!r}", line_no)
        answers[record["id"]] = record["answer"]
    return answers
