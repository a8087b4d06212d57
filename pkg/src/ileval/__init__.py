"""Reference-based evaluation of interleaved image-text answers.

Five metrics on a shared 0-100 scale: text quality (ROUGE-1 of the prose),
image selection (normalized edit distance over image index sequences), image
ordering (concordant-pair ratio), and two image-text consistency scores
(context alignment and dual-encoder similarity), plus failure
classification, corpus aggregation, human-correlation analysis, and a
scalar reward for RL fine-tuning.
"""

from .analysis import correlate_with_human, pearson, spearman
from .consistency import (
    ConsistencyScores,
    alignment_score,
    clip_score,
    cosine_similarity,
    score_consistency,
)
from .corpus import (
    EvalSample,
    ImageAsset,
    PromptTemplate,
    RetrievedDocument,
    build_prompt,
    load_corpus,
    validate_sample,
    write_corpus,
)
from .evaluator import (
    CorpusReport,
    EvalConfig,
    SampleReport,
    aggregate,
    emit_report,
    evaluate_corpus,
    evaluate_sample,
    load_answers,
    load_report,
)
from .parsing import (
    AnswerEnvelope,
    FailureFlags,
    ImageContext,
    ImageReference,
    ParsedAnswer,
    extract_answer_envelope,
    extract_contexts,
    extract_image_sequence,
    parse_answer,
    render_with_urls,
    strip_markup,
)
from .providers import (
    ConstantProvider,
    HttpProvider,
    MockProvider,
    ProviderCapabilities,
    ScoringProvider,
)
from .reward import RewardConfig, compute_reward, reward_batch
from .seqmetrics import (
    CorrectSubsequence,
    correct_subsequence,
    edit_distance_score,
    kendall_score,
)
from .textmetrics import RougeScore, TokenSequence, rouge, tokenize

__version__ = "0.1.0"

__all__ = [
    "AnswerEnvelope",
    "ConsistencyScores",
    "ConstantProvider",
    "CorpusReport",
    "CorrectSubsequence",
    "EvalConfig",
    "EvalSample",
    "FailureFlags",
    "HttpProvider",
    "ImageAsset",
    "ImageContext",
    "ImageReference",
    "MockProvider",
    "ParsedAnswer",
    "PromptTemplate",
    "ProviderCapabilities",
    "RetrievedDocument",
    "RewardConfig",
    "RougeScore",
    "SampleReport",
    "ScoringProvider",
    "TokenSequence",
    "aggregate",
    "alignment_score",
    "build_prompt",
    "clip_score",
    "compute_reward",
    "correlate_with_human",
    "correct_subsequence",
    "cosine_similarity",
    "edit_distance_score",
    "emit_report",
    "evaluate_corpus",
    "evaluate_sample",
    "extract_answer_envelope",
    "extract_contexts",
    "extract_image_sequence",
    "kendall_score",
    "load_answers",
    "load_corpus",
    "load_report",
    "parse_answer",
    "pearson",
    "render_with_urls",
    "reward_batch",
    "rouge",
    "score_consistency",
    "spearman",
    "strip_markup",
    "tokenize",
    "validate_sample",
    "write_corpus",
]
