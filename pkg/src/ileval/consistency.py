"""Image-text consistency scores.

Two complementary measures, both on a 0-100 scale:

- alignment: for each image shared between the generated and ground-truth
  answers, the cosine similarity of the text surrounding it on either side
  (the same image should sit in a similar textual context);
- clip: for each image used by the generated answer, the image-text
  similarity of the image against its description plus local context, as
  judged by a dual-encoder backend.

Raw similarities map to scores as 100 * max(0, sim), averaged over images.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .corpus import ImageAsset
from .errors import DimensionMismatch, MissingAsset, MissingContext, ZeroVector
from .parsing import ImageContext, ParsedAnswer
from .providers import ScoringProvider, embed_texts, score_image_text
from .seqmetrics import CorrectSubsequence


@dataclass
class ConsistencyScores:
    """Both consistency scores plus the per-image raw similarities.

    ``per_image`` rows are (image_index, alignment_sim, clip_sim); the
    alignment entry is None for images the ground truth does not use.
    """

    alignment: float
    clip: float
    per_image: list[tuple[int, float | None, float | None]]


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatch(f"vector shapes differ: {a.shape} vs {b.shape}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroVector("cosine similarity is undefined for all-zero vectors")
    return float(np.dot(a, b) / (norm_a * norm_b))


def _context_map(contexts: Sequence[ImageContext]) -> dict[int, ImageContext]:
    by_index: dict[int, ImageContext] = {}
    for ctx in contexts:
        by_index.setdefault(ctx.image_index, ctx)
    return by_index


def _nonneg(sim: float) -> float:
    return max(0.0, sim)


def alignment_similarities(
    gen_contexts: Sequence[ImageContext],
    gt_contexts: Sequence[ImageContext],
    correct: CorrectSubsequence,
    provider: ScoringProvider,
) -> list[tuple[int, float]]:
    """Raw per-image context similarity for each shared image, in order.

    Contexts with no text on either side cannot be embedded: two empty
    contexts count as perfectly similar, one empty against one nonempty as
    entirely dissimilar.
    """
    gen_by_index = _context_map(gen_contexts)
    gt_by_index = _context_map(gt_contexts)
    fixed: dict[int, float] = {}
    pending: list[tuple[int, str, str]] = []
    for index in correct.indices:
        if index not in gen_by_index or index not in gt_by_index:
            side = "generated" if index not in gen_by_index else "ground-truth"
            raise MissingContext(f"image {index} has no {side} context")
        gen_ctx = gen_by_index[index]
        gt_ctx = gt_by_index[index]
        gen_text = gen_ctx.before_text + gen_ctx.after_text
        gt_text = gt_ctx.before_text + gt_ctx.after_text
        if not gen_text.strip() or not gt_text.strip():
            fixed[index] = 1.0 if gen_text.strip() == gt_text.strip() else 0.0
        else:
            pending.append((index, gen_text, gt_text))

    sims = dict(fixed)
    if pending:
        texts = [t for _, gen, gt in pending for t in (gen, gt)]
        vectors = embed_texts(provider, texts)
        for row, (index, _, _) in enumerate(pending):
            sims[index] = cosine_similarity(vectors[2 * row], vectors[2 * row + 1])
    return [(index, sims[index]) for index in correct.indices]


def alignment_score(
    gen_contexts: Sequence[ImageContext],
    gt_contexts: Sequence[ImageContext],
    correct: CorrectSubsequence,
    provider: ScoringProvider,
) -> float:
    """Mean context similarity over shared images, scaled to [0, 100].

    Zero when no image is shared.
    """
    if len(correct) == 0:
        return 0.0
    sims = alignment_similarities(gen_contexts, gt_contexts, correct, provider)
    return 100.0 * sum(_nonneg(s) for _, s in sims) / len(sims)


def clip_similarities(
    parsed: ParsedAnswer,
    contexts: Sequence[ImageContext],
    assets: Mapping[int, ImageAsset],
    provider: ScoringProvider,
) -> list[tuple[int, float]]:
    """Raw image-text similarity for each in-range generated image, in order.

    The text side pairs the placeholder's description with its local
    context, truncated to the provider's text limit.
    """
    refs = parsed.in_range_refs()
    if not refs:
        return []
    if len(contexts) != len(refs):
        raise MissingContext(
            f"{len(refs)} in-range references but {len(contexts)} contexts"
        )
    max_len = provider.capabilities().max_text_len
    pairs: list[tuple[str, str]] = []
    for ref, ctx in zip(refs, contexts):
        if ref.index != ctx.image_index:
            raise MissingContext(
                f"context order mismatch: reference {ref.index} vs {ctx.image_index}"
            )
        if ref.index not in assets:
            raise MissingAsset(f"no asset for in-range image index {ref.index}")
        text = (ref.alt_text + ctx.before_text + ctx.after_text)[:max_len]
        pairs.append((assets[ref.index].locator, text))
    scores = score_image_text(provider, pairs)
    return [(ref.index, score) for ref, score in zip(refs, scores)]


def clip_score(
    parsed: ParsedAnswer,
    contexts: Sequence[ImageContext],
    assets: Mapping[int, ImageAsset],
    provider: ScoringProvider,
) -> float:
    """Mean image-text similarity over generated images, scaled to [0, 100].

    Zero when the answer uses no in-range image.
    """
    sims = clip_similarities(parsed, contexts, assets, provider)
    if not sims:
        return 0.0
    return 100.0 * sum(_nonneg(s) for _, s in sims) / len(sims)


def score_consistency(
    parsed: ParsedAnswer,
    gen_contexts: Sequence[ImageContext],
    gt_contexts: Sequence[ImageContext],
    correct: CorrectSubsequence,
    assets: Mapping[int, ImageAsset],
    provider: ScoringProvider,
) -> ConsistencyScores:
    """Compute both consistency scores and assemble per-image details."""
    align_sims = (
        alignment_similarities(gen_contexts, gt_contexts, correct, provider)
        if len(correct)
        else []
    )
    clip_sims = clip_similarities(parsed, gen_contexts, assets, provider)
    alignment = (
        100.0 * sum(_nonneg(s) for _, s in align_sims) / len(align_sims)
        if align_sims
        else 0.0
    )
    clip = (
        100.0 * sum(_nonneg(s) for _, s in clip_sims) / len(clip_sims)
        if clip_sims
        else 0.0
    )
    align_by_index = dict(align_sims)
    per_image = [
        (index, align_by_index.get(index), sim) for index, sim in clip_sims
    ]
    return ConsistencyScores(alignment=alignment, clip=clip, per_image=per_image)
