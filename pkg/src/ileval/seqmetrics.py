"""Image selection and ordering scores over index sequences.

Both metrics compare the deduplicated sequence of image indices used by a
generated answer against the ground-truth sequence: a normalized edit
distance for selection accuracy and a concordant-pair ratio for ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

ImageSequence = Sequence[int]


@dataclass
class CorrectSubsequence:
    """Shared indices of two sequences, ordered as in the generated one.

    ``gt_positions[k]`` is the 0-based position of ``indices[k]`` in the
    ground-truth sequence.
    """

    indices: list[int]
    gt_positions: list[int]

    def __len__(self) -> int:
        return len(self.indices)


def _require_duplicate_free(seq: ImageSequence, name: str) -> None:
    if len(set(seq)) != len(seq):
        raise ValueError(f"{name} sequence contains duplicates: {list(seq)}")


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Minimum number of unit-cost insertions, deletions, and substitutions."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        cur = [i]
        for j, y in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def edit_distance_score(generated: ImageSequence, ground_truth: ImageSequence) -> float:
    """Similarity of two index sequences: 1 - distance / max(m, n).

    Two empty sequences score 1.0 (perfect agreement of empty selections).
    """
    m, n = len(generated), len(ground_truth)
    if m == 0 and n == 0:
        return 1.0
    return 1.0 - levenshtein(generated, ground_truth) / max(m, n)


def correct_subsequence(
    generated: ImageSequence, ground_truth: ImageSequence
) -> CorrectSubsequence:
    """Intersection of two duplicate-free sequences, in generated order."""
    _require_duplicate_free(generated, "generated")
    _require_duplicate_free(ground_truth, "ground_truth")
    positions = {idx: pos for pos, idx in enumerate(ground_truth)}
    indices = [idx for idx in generated if idx in positions]
    return CorrectSubsequence(
        indices=indices, gt_positions=[positions[idx] for idx in indices]
    )


def kendall_score(generated: ImageSequence, ground_truth: ImageSequence) -> float:
    """Ordering consistency of the shared images, in [0, 1].

    With o = |shared images| > 1, the score is the fraction of pairs (i < j,
    in generated order) whose ground-truth positions are also increasing.
    With o <= 1 no pair exists and the score falls back to o / max(m, n).
    Two empty sequences score 1.0.
    """
    m, n = len(generated), len(ground_truth)
    if m == 0 and n == 0:
        return 1.0
    shared = correct_subsequence(generated, ground_truth)
    o = len(shared)
    if o <= 1:
        return o / max(m, n)
    pos = shared.gt_positions
    concordant = sum(
        1 for i in range(o) for j in range(i + 1, o) if pos[i] < pos[j]
    )
    return concordant / (o * (o - 1) / 2)
