"""Command-line entry point.

Subcommands:
  evaluate   score a corpus against an answers file and write a report
  parse      dump the structured view of a single answer, with flags
  correlate  correlate a report with human scores
  reward     emit per-answer rewards as JSONL
  render     substitute image URLs into an answer's placeholders

Exit codes: 0 success, 1 data errors, 2 provider or I/O errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from .analysis import correlate_with_human, load_human_scores
from .corpus import load_corpus
from .errors import DataError, IOFailure, ProviderError
from .evaluator import (
    EvalConfig,
    emit_report,
    evaluate_corpus,
    load_answers,
    load_report,
)
from .parsing import extract_answer_envelope, parse_answer, render_with_urls
from .providers import HttpProvider, MockProvider, ScoringProvider
from .reward import RewardConfig, compute_reward

log = logging.getLogger(__name__)

ENDPOINT_ENV_VAR = "ILEVAL_PROVIDER_ENDPOINT"


def _require_file(path: str, what: str) -> None:
    if not Path(path).is_file():
        raise DataError(f"{what} path does not exist: {path}")


def _add_provider_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--provider-endpoint",
        default=None,
        help=f"base URL of a provider service (or ${ENDPOINT_ENV_VAR})",
    )
    parser.add_argument(
        "--mock-fixture",
        dest="mock_fixture_path",
        default=None,
        help="path of a deterministic mock-provider fixture JSON",
    )


def _make_provider(args: argparse.Namespace) -> ScoringProvider:
    endpoint = args.provider_endpoint or os.environ.get(ENDPOINT_ENV_VAR)
    if bool(endpoint) == bool(args.mock_fixture_path):
        raise DataError(
            "exactly one of --provider-endpoint / --mock-fixture must be given"
        )
    if endpoint:
        return HttpProvider(endpoint)
    _require_file(args.mock_fixture_path, "mock fixture")
    return MockProvider.from_file(args.mock_fixture_path)


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        try:
            Path(out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise IOFailure(f"cannot write {out}: {exc}") from exc
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _cmd_evaluate(args: argparse.Namespace) -> int:
    _require_file(args.corpus, "corpus")
    _require_file(args.answers, "answers")
    provider = _make_provider(args)
    samples = load_corpus(args.corpus)
    answers = load_answers(args.answers)
    report = evaluate_corpus(
        samples,
        answers,
        provider,
        EvalConfig(context_window_cap=args.context_window_cap),
        workers=args.workers,
    )
    emit_report(report, args.format, args.out)
    log.info("wrote %s report for %d samples to %s",
             args.format, len(report.per_sample), args.out)
    return 0


def _cmd_parse(args: argparse.Namespace) -> int:
    _require_file(args.answer_file, "answer file")
    try:
        raw = Path(args.answer_file).read_text(encoding="utf-8")
    except OSError as exc:
        raise IOFailure(f"cannot read answer {args.answer_file}: {exc}") from exc
    envelope = extract_answer_envelope(raw)
    parsed = parse_answer(envelope.answer, args.image_count)
    dump = {
        "reason": envelope.reason,
        "category": envelope.category,
        "image_refs": [
            {"index": r.index, "alt_text": r.alt_text, "char_span": list(r.char_span)}
            for r in parsed.image_refs
        ],
        "text_segments": parsed.text_segments,
        "citations": parsed.citations,
        "flags": {
            "invalid_format": parsed.flags.invalid_format,
            "hallucinated_indices": parsed.flags.hallucinated_indices,
        },
    }
    _write_or_print(json.dumps(dump, ensure_ascii=False, indent=2) + "\n", args.out)
    return 0


def _cmd_correlate(args: argparse.Namespace) -> int:
    _require_file(args.report, "report")
    _require_file(args.human, "human scores")
    report = load_report(args.report)
    human = load_human_scores(args.human)
    rows = correlate_with_human(report, human)
    _write_or_print(
        json.dumps([dataclasses.asdict(row) for row in rows], indent=2) + "\n",
        args.out,
    )
    return 0


def _cmd_reward(args: argparse.Namespace) -> int:
    _require_file(args.corpus, "corpus")
    _require_file(args.answers, "answers")
    provider = _make_provider(args)
    samples = {s.id: s for s in load_corpus(args.corpus)}
    answers = load_answers(args.answers)
    config = RewardConfig()
    if args.reward_weights:
        weights = tuple(float(w) for w in args.reward_weights.split(","))
        config = RewardConfig(weights=weights)  # type: ignore[arg-type]
    lines = []
    for answer_id, answer in answers.items():
        if answer_id not in samples:
            raise DataError(f"answer id {answer_id!r} not in corpus")
        value = compute_reward(
            samples[answer_id],
            answer,
            provider,
            config,
            EvalConfig(context_window_cap=args.context_window_cap),
        )
        lines.append(json.dumps({"id": answer_id, "reward": value}))
    _write_or_print("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_render(args: argparse.Namespace) -> int:
    _require_file(args.answer_file, "answer file")
    _require_file(args.url_map, "url map")
    try:
        raw = Path(args.answer_file).read_text(encoding="utf-8")
        url_map_raw = json.loads(Path(args.url_map).read_text(encoding="utf-8"))
    except OSError as exc:
        raise IOFailure(f"cannot read input: {exc}") from exc
    url_map = {int(k): str(v) for k, v in url_map_raw.items()}
    image_count = args.image_count or (max(url_map) if url_map else 1)
    parsed = parse_answer(raw, image_count)
    _write_or_print(render_with_urls(parsed, url_map), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ileval",
        description="Score interleaved image-text answers against references.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    evaluate = sub.add_parser("evaluate", help="score a corpus and write a report")
    evaluate.add_argument("--corpus", required=True, help="corpus JSONL path")
    evaluate.add_argument("--answers", required=True, help="answers JSONL path")
    _add_provider_flags(evaluate)
    evaluate.add_argument("--out", required=True, help="report output path")
    evaluate.add_argument("--format", choices=("json", "csv"), default="json")
    evaluate.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    evaluate.add_argument("--context-window-cap", type=int, default=500)
    evaluate.set_defaults(func=_cmd_evaluate)

    parse = sub.add_parser("parse", help="dump the structured view of one answer")
    parse.add_argument("--answer-file", required=True)
    parse.add_argument("--image-count", type=int, required=True)
    parse.add_argument("--out", default=None)
    parse.set_defaults(func=_cmd_parse)

    correlate = sub.add_parser("correlate", help="correlate a report with human scores")
    correlate.add_argument("--report", required=True, help="JSON report path")
    correlate.add_argument("--human", required=True, help="human scores JSONL path")
    correlate.add_argument("--out", default=None)
    correlate.set_defaults(func=_cmd_correlate)

    reward = sub.add_parser("reward", help="emit per-answer rewards as JSONL")
    reward.add_argument("--corpus", required=True)
    reward.add_argument("--answers", required=True)
    _add_provider_flags(reward)
    reward.add_argument("--reward-weights", default=None,
                        help="five comma-separated weights summing to 1")
    reward.add_argument("--context-window-cap", type=int, default=500)
    reward.add_argument("--out", default=None)
    reward.set_defaults(func=_cmd_reward)

    render = sub.add_parser("render", help="substitute image URLs into an answer")
    render.add_argument("--answer-file", required=True)
    render.add_argument("--url-map", required=True,
                        help="JSON file mapping image index to URL")
    render.add_argument("--image-count", type=int, default=None)
    render.add_argument("--out", default=None)
    render.set_defaults(func=_cmd_render)
    return parser


def run(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (IOFailure, ProviderError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
