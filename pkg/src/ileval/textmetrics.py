"""Tokenization and ROUGE scoring of answer prose against reference prose.

The text-quality score reported by the evaluator is ROUGE-1 F1; ROUGE-2 and
ROUGE-L are provided for completeness. Callers are expected to strip markdown
protocol (image placeholders, citations) before tokenizing -- see
``ileval.parsing.strip_markup``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

ROUGE_VARIANTS = ("rouge1", "rouge2", "rougeL")

# Codepoint ranges tokenized one character at a time: Han ideographs
# (incl. extension A and compatibility block), kana, and Hangul syllables.
_CJK_RANGES = (
    (0x3400, 0x4DBF),
    (0x4E00, 0x9FFF),
    (0xF900, 0xFAFF),
    (0x3040, 0x30FF),
    (0xAC00, 0xD7AF),
)


def _is_cjk(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _CJK_RANGES)


@dataclass
class TokenSequence:
    """A tokenized text, tagged with which side of the comparison it is."""

    tokens: list[str] = field(default_factory=list)
    source_kind: str = "candidate"

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass
class RougeScore:
    precision: float
    recall: float
    f1: float


def tokenize(text: str, source_kind: str = "candidate") -> TokenSequence:
    """Lowercase and split text into ROUGE tokens.

    Latin (and other cased) script is lowercased; runs of alphanumeric
    characters form one token each; whitespace and punctuation split; every
    CJK codepoint becomes its own token. Word segmentation of CJK text is
    ambiguous, so the character-level rule keeps scoring deterministic.
    """
    tokens: list[str] = []
    run: list[str] = []
    for ch in text.lower():
        if _is_cjk(ch):
            if run:
                tokens.append("".join(run))
                run = []
            tokens.append(ch)
        elif ch.isalnum():
            run.append(ch)
        else:
            if run:
                tokens.append("".join(run))
                run = []
    if run:
        tokens.append("".join(run))
    return TokenSequence(tokens=tokens, source_kind=source_kind)


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _lcs_length(a: list[str], b: list[str]) -> int:
    """Length of the longest common subsequence of two token lists.

    Row-vectorized DP: within a row the left-neighbor dependency reduces to a
    running maximum because LCS rows are nondecreasing, so each row is a pair
    of numpy ops instead of a Python inner loop.
    """
    if not a or not b:
        return 0
    codes = {tok: i for i, tok in enumerate(dict.fromkeys(a + b))}
    a_arr = np.array([codes[t] for t in a], dtype=np.int64)
    b_arr = np.array([codes[t] for t in b], dtype=np.int64)
    prev = np.zeros(len(b_arr) + 1, dtype=np.int64)
    cur = np.zeros(len(b_arr) + 1, dtype=np.int64)
    for x in a_arr:
        np.maximum(prev[1:], prev[:-1] + (b_arr == x), out=cur[1:])
        np.maximum.accumulate(cur, out=cur)
        prev, cur = cur, prev
    return int(prev[-1])


def _prf(overlap: float, cand_total: int, ref_total: int) -> RougeScore:
    precision = overlap / cand_total if cand_total else 0.0
    recall = overlap / ref_total if ref_total else 0.0
    if precision + recall == 0.0:
        f1 = 0.0
    else:
        f1 = 2.0 * precision * recall / (precision + recall)
    return RougeScore(precision=precision, recall=recall, f1=f1)


def rouge(
    candidate: TokenSequence, reference: TokenSequence, variant: str = "rouge1"
) -> RougeScore:
    """Compute a ROUGE score between candidate and reference tokens.

    rouge1/rouge2 use clipped n-gram overlap (each reference n-gram credited
    at most its reference multiplicity); rougeL uses the longest common
    subsequence. Precision divides by the candidate count, recall by the
    reference count. An empty candidate or reference scores all zeros.
    """
    if variant not in ROUGE_VARIANTS:
        raise ValueError(f"unknown rouge variant {variant!r}")
    cand, ref = candidate.tokens, reference.tokens
    if not cand or not ref:
        return RougeScore(0.0, 0.0, 0.0)
    if variant == "rougeL":
        return _prf(_lcs_length(cand, ref), len(cand), len(ref))
    n = 1 if variant == "rouge1" else 2
    cand_ngrams = _ngrams(cand, n)
    ref_ngrams = _ngrams(ref, n)
    overlap = sum(min(count, ref_ngrams[g]) for g, count in cand_ngrams.items())
    return _prf(overlap, sum(cand_ngrams.values()), sum(ref_ngrams.values()))
