"""Shared fixtures: sample builders and deterministic provider fixtures."""

from __future__ import annotations

import hashlib
import json
import math

import pytest

from ileval.corpus import EvalSample, ImageAsset, RetrievedDocument
from ileval.evaluator import EvalConfig
from ileval.parsing import extract_contexts, extract_image_sequence, parse_answer
from ileval.providers import DEFAULT_MAX_TEXT_LEN
from ileval.seqmetrics import correct_subsequence


def make_sample(
    sample_id: str = "s1",
    image_count: int = 2,
    ground_truth: str | None = None,
    query: str = "how do cats nap?",
    doc_text: str = "cats nap a lot",
    category: str | None = None,
) -> EvalSample:
    """One-document sample with image_count images and a simple ground truth."""
    if ground_truth is None:
        parts = ["Cats nap often."]
        for k in range(1, image_count + 1):
            parts.append(f"![cat {k}](IMG#{k})")
            parts.append(f"Nap spot {k} is cozy.")
        ground_truth = " ".join(parts)
    images = [
        ImageAsset(index=k, locator=f"http://img.example/{sample_id}/{k}.jpg")
        for k in range(1, image_count + 1)
    ]
    return EvalSample(
        id=sample_id,
        query=query,
        documents=[RetrievedDocument(doc_index=1, text=doc_text, images=images)],
        ground_truth=ground_truth,
        category=category,
    )


def _hash_floats(key: str, count: int) -> list[float]:
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    values = []
    for i in range(count):
        chunk = digest[(4 * i) % 28 : (4 * i) % 28 + 4]
        values.append(int.from_bytes(chunk, "big") / 2**32)
    return values


def text_vector(text: str, dim: int = 8) -> list[float]:
    """Deterministic pseudo-embedding; identical texts get identical vectors."""
    raw = _hash_floats("vec:" + text, dim)
    norm = math.sqrt(sum(v * v for v in raw))
    return [v / norm for v in raw]


def pair_score(image: str, text: str) -> float:
    """Deterministic pseudo image-text similarity in [-1, 1]."""
    return 2.0 * _hash_floats(f"pair:{image}|{text}", 1)[0] - 1.0


def build_fixture(
    samples: list[EvalSample],
    answers: dict[str, str],
    config: EvalConfig | None = None,
    pair_value: float | None = None,
) -> dict:
    """Mock-provider fixture covering every key the evaluator will look up."""
    config = config or EvalConfig()
    text_vectors: dict[str, list[float]] = {}
    pair_scores: list[dict] = []
    seen_pairs: set[tuple[str, str]] = set()
    for sample in samples:
        if sample.id not in answers:
            continue
        n = sample.image_count
        answer = parse_answer(answers[sample.id], n)
        if answer.flags.invalid_format:
            continue
        truth = parse_answer(sample.ground_truth, n)
        generated = extract_image_sequence(answer)
        expected = extract_image_sequence(truth)
        correct = correct_subsequence(generated, expected)
        gen_ctx = {
            c.image_index: c for c in reversed(extract_contexts(answer, config.context_window_cap))
        }
        gt_ctx = {
            c.image_index: c for c in reversed(extract_contexts(truth, config.context_window_cap))
        }
        for index in correct.indices:
            for ctx in (gen_ctx[index], gt_ctx[index]):
                text = ctx.before_text + ctx.after_text
                if text.strip():
                    text_vectors.setdefault(text, text_vector(text))
        assets = sample.assets()
        contexts = extract_contexts(answer, config.context_window_cap)
        for ref, ctx in zip(answer.in_range_refs(), contexts):
            text = (ref.alt_text + ctx.before_text + ctx.after_text)[
                :DEFAULT_MAX_TEXT_LEN
            ]
            key = (assets[ref.index].locator, text)
            if key not in seen_pairs:
                seen_pairs.add(key)
                score = pair_score(*key) if pair_value is None else pair_value
                pair_scores.append({"image": key[0], "text": key[1], "score": score})
    return {"text_vectors": text_vectors, "pair_scores": pair_scores}


def write_jsonl(path, records: list[dict]) -> None:
    path.write_text(
        "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records),
        encoding="utf-8",
    )


@pytest.fixture
def sample() -> EvalSample:
    return make_sample()
