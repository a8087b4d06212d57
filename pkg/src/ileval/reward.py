"""The metric suite as a scalar reward for RL fine-tuning.

The reward is the weighted sum of the five per-sample scores rescaled to
[0, 1]. Answers with broken markdown structure are hard failures: with
gating enabled (the default) they earn zero reward regardless of weights.
Rewards are deterministic for a deterministic provider, so identical
completions within a sampling group receive identical rewards.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .corpus import EvalSample
from .errors import InvariantError
from .evaluator import METRIC_FIELDS, EvalConfig, evaluate_sample
from .providers import ScoringProvider


@dataclass(frozen=True)
class RewardConfig:
    """Per-metric weights (order: rouge1, edit_distance, kendall, alignment,
    clip) and the invalid-format gate."""

    weights: tuple[float, float, float, float, float] = (0.2, 0.2, 0.2, 0.2, 0.2)
    gate_invalid_format: bool = True

    def __post_init__(self):
        if len(self.weights) != len(METRIC_FIELDS):
            raise ValueError(f"expected {len(METRIC_FIELDS)} weights")
        if any(w < 0 for w in self.weights):
            raise ValueError(f"weights must be nonnegative: {self.weights}")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1: {self.weights}")


def compute_reward(
    sample: EvalSample,
    answer_markdown: str,
    provider: ScoringProvider,
    config: RewardConfig | None = None,
    eval_config: EvalConfig | None = None,
) -> float:
    """Score one completion in [0, 1]."""
    config = config or RewardConfig()
    report = evaluate_sample(sample, answer_markdown, provider, eval_config)
    if config.gate_invalid_format and report.flags.invalid_format:
        return 0.0
    return sum(
        weight * report.metric(name) / 100.0
        for weight, name in zip(config.weights, METRIC_FIELDS)
    )


def reward_batch(
    samples_by_id: dict[str, EvalSample],
    request: dict,
    provider: ScoringProvider,
    config: RewardConfig | None = None,
    eval_config: EvalConfig | None = None,
) -> dict:
    """Serve one batch-reward request against a loaded corpus.

    Request: {"samples": [sample_id, ...], "answers": [str, ...]};
    response: {"rewards": [float, ...]}, order-aligned with the request.
    """
    sample_ids: Sequence[str] = request.get("samples", [])
    answers: Sequence[str] = request.get("answers", [])
    if len(sample_ids) != len(answers):
        raise InvariantError(
            f"{len(sample_ids)} sample ids but {len(answers)} answers"
        )
    rewards = []
    for sample_id, answer in zip(sample_ids, answers):
        if sample_id not in samples_by_id:
            raise InvariantError("unknown sample id", sample_id=sample_id)
        rewards.append(
            compute_reward(samples_by_id[sample_id], answer, provider, config, eval_config)
        )
    return {"rewards": rewards}
