from __future__ import annotations

import itertools
import random

import pytest

from ileval.seqmetrics import (
    correct_subsequence,
    edit_distance_score,
    kendall_score,
    levenshtein,
)


def naive_edit_distance(a, b):
    """Exponential-recursion oracle over all operation sequences."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    return min(
        naive_edit_distance(a[1:], b) + 1,
        naive_edit_distance(a, b[1:]) + 1,
        naive_edit_distance(a[1:], b[1:]) + (a[0] != b[0]),
    )


def kendall_oracle(generated, ground_truth):
    """Direct concordant-pair enumeration, independent of the implementation."""
    m, n = len(generated), len(ground_truth)
    if m == 0 and n == 0:
        return 1.0
    in_gt = [x for x in generated if x in ground_truth]
    o = len(in_gt)
    if o <= 1:
        return o / max(m, n)
    concordant = 0
    for i, j in itertools.combinations(range(o), 2):
        if ground_truth.index(in_gt[i]) < ground_truth.index(in_gt[j]):
            concordant += 1
    return concordant / (o * (o - 1) / 2)


def duplicate_free_sequences(alphabet, max_len):
    for length in range(0, min(max_len, len(alphabet)) + 1):
        yield from itertools.permutations(alphabet, length)


class TestEditDistance:
    def test_identical_sequences_score_one(self):
        assert edit_distance_score([1, 2], [1, 2]) == 1.0

    def test_empty_against_nonempty_scores_zero(self):
        assert edit_distance_score([], [1, 2, 3]) == 0.0
        assert edit_distance_score([1, 2, 3], []) == 0.0

    def test_single_substitution_in_three(self):
        assert edit_distance_score([1, 3, 2], [1, 2]) == pytest.approx(1 - 1 / 3)

    def test_both_empty_scores_one(self):
        assert edit_distance_score([], []) == 1.0

    def test_symmetric(self):
        rng = random.Random(3)
        for _ in range(200):
            a = [rng.randint(1, 5) for _ in range(rng.randint(0, 6))]
            b = [rng.randint(1, 5) for _ in range(rng.randint(0, 6))]
            assert edit_distance_score(a, b) == edit_distance_score(b, a)

    def test_bounded_and_one_iff_equal(self):
        for a, b in itertools.product(duplicate_free_sequences([1, 2, 3], 3), repeat=2):
            score = edit_distance_score(a, b)
            assert 0.0 <= score <= 1.0
            assert (score == 1.0) == (a == b)

    def test_distance_triangle_inequality(self):
        seqs = [
            seq
            for length in range(4)
            for seq in itertools.product([1, 2, 3], repeat=length)
        ]
        for a, b, c in itertools.product(seqs, repeat=3):
            assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)

    def test_relabeling_invariance(self):
        relabel = {1: 7, 2: 9, 3: 4}
        for a, b in itertools.product(duplicate_free_sequences([1, 2, 3], 3), repeat=2):
            mapped_a = [relabel[x] for x in a]
            mapped_b = [relabel[x] for x in b]
            assert edit_distance_score(a, b) == edit_distance_score(mapped_a, mapped_b)


class TestCorrectSubsequence:
    def test_orders_by_generated_sequence(self):
        shared = correct_subsequence([2, 1, 3], [1, 2, 3])
        assert shared.indices == [2, 1, 3]
        assert shared.gt_positions == [1, 0, 2]

    def test_disjoint_sequences_empty(self):
        assert len(correct_subsequence([1, 2], [3, 4])) == 0

    def test_single_shared(self):
        shared = correct_subsequence([1], [1])
        assert shared.indices == [1]
        assert shared.gt_positions == [0]

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            correct_subsequence([1, 1], [1, 2])
        with pytest.raises(ValueError):
            correct_subsequence([1, 2], [2, 2])


class TestKendallScore:
    def test_identical_order_scores_one(self):
        assert kendall_score([1, 2, 3], [1, 2, 3]) == 1.0

    def test_full_reversal_scores_zero(self):
        assert kendall_score([3, 2, 1], [1, 2, 3]) == 0.0

    def test_one_swap_of_three(self):
        assert kendall_score([2, 1, 3], [1, 2, 3]) == pytest.approx(2 / 3)

    def test_single_overlap_falls_back_to_length_ratio(self):
        assert kendall_score([1, 5], [1, 2, 3]) == pytest.approx(1 / 3)

    def test_no_overlap_scores_zero(self):
        assert kendall_score([4, 5], [1, 2, 3]) == 0.0

    def test_both_empty_scores_one(self):
        assert kendall_score([], []) == 1.0

    def test_empty_generated_scores_zero(self):
        assert kendall_score([], [1, 2]) == 0.0

    def test_matches_enumeration_oracle(self):
        rng = random.Random(11)
        for _ in range(500):
            pool = list(range(1, 12))
            rng.shuffle(pool)
            a = pool[: rng.randint(0, 8)]
            rng.shuffle(pool)
            b = pool[: rng.randint(0, 8)]
            assert kendall_score(a, b) == pytest.approx(kendall_oracle(a, b), abs=1e-12)
            assert 0.0 <= kendall_score(a, b) <= 1.0

    def test_relabeling_invariance(self):
        relabel = {i: 100 - i for i in range(1, 12)}
        rng = random.Random(13)
        for _ in range(200):
            pool = list(range(1, 12))
            rng.shuffle(pool)
            a = pool[: rng.randint(0, 6)]
            rng.shuffle(pool)
            b = pool[: rng.randint(0, 6)]
            mapped = kendall_score([relabel[x] for x in a], [relabel[x] for x in b])
            assert kendall_score(a, b) == pytest.approx(mapped, abs=1e-12)

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            kendall_score([1, 1], [1, 2])
