from __future__ import annotations

import pytest

import ileval.reward as reward_mod
from ileval.errors import InvariantError
from ileval.evaluator import SampleReport
from ileval.parsing import FailureFlags
from ileval.providers import ConstantProvider
from ileval.reward import RewardConfig, compute_reward, reward_batch

from conftest import make_sample


def stub_scores(monkeypatch, values, invalid_format=False):
    rouge1, edit, kendall, alignment, clip = values

    def fake_evaluate(sample, answer, provider, config=None):
        return SampleReport(
            sample_id=sample.id,
            rouge1=rouge1,
            edit_distance=edit,
            kendall=kendall,
            alignment=alignment,
            clip=clip,
            mean=sum(values) / 5,
            flags=FailureFlags(invalid_format=invalid_format),
        )

    monkeypatch.setattr(reward_mod, "evaluate_sample", fake_evaluate)


class TestRewardConfig:
    def test_default_weights_uniform(self):
        assert RewardConfig().weights == (0.2, 0.2, 0.2, 0.2, 0.2)

    def test_rejects_negative_weights(self):
        with pytest.raises(ValueError):
            RewardConfig(weights=(0.5, 0.7, -0.2, 0.0, 0.0))

    def test_rejects_weights_not_summing_to_one(self):
        with pytest.raises(ValueError):
            RewardConfig(weights=(0.2, 0.2, 0.2, 0.2, 0.1))

    def test_rejects_wrong_arity(self):
        with pytest.raises(ValueError):
            RewardConfig(weights=(0.5, 0.5))


class TestComputeReward:
    def test_ground_truth_with_identity_provider_scores_one(self):
        sample = make_sample(image_count=2)
        value = compute_reward(sample, sample.ground_truth, ConstantProvider())
        assert value == pytest.approx(1.0)

    def test_invalid_format_gated_to_zero(self):
        sample = make_sample(image_count=2)
        value = compute_reward(sample, "broken ![x](IMG#1", ConstantProvider())
        assert value == 0.0

    def test_gate_can_be_disabled(self, monkeypatch):
        stub_scores(monkeypatch, (100.0, 0.0, 0.0, 0.0, 0.0), invalid_format=True)
        config = RewardConfig(gate_invalid_format=False)
        value = compute_reward(make_sample(), "x", ConstantProvider(), config)
        assert value == pytest.approx(0.2)

    def test_weighted_sum_arithmetic(self, monkeypatch):
        stub_scores(monkeypatch, (100.0, 50.0, 50.0, 0.0, 0.0))
        value = compute_reward(make_sample(), "x", ConstantProvider())
        assert value == pytest.approx(0.4)

    def test_weight_concentrated_on_one_metric(self, monkeypatch):
        stub_scores(monkeypatch, (10.0, 20.0, 30.0, 40.0, 75.0))
        config = RewardConfig(weights=(0.0, 0.0, 0.0, 0.0, 1.0))
        value = compute_reward(make_sample(), "x", ConstantProvider(), config)
        assert value == pytest.approx(0.75)

    def test_bounded_and_monotone(self, monkeypatch):
        low = (10.0, 20.0, 30.0, 40.0, 50.0)
        stub_scores(monkeypatch, low)
        low_value = compute_reward(make_sample(), "x", ConstantProvider())
        stub_scores(monkeypatch, (10.0, 20.0, 90.0, 40.0, 50.0))
        high_value = compute_reward(make_sample(), "x", ConstantProvider())
        assert 0.0 <= low_value <= high_value <= 1.0

    def test_deterministic_across_calls(self):
        sample = make_sample(image_count=2)
        answer = "Cats nap often. ![cat 1](IMG#1) Nap spot 1 is cozy."
        values = {
            compute_reward(sample, answer, ConstantProvider()) for _ in range(5)
        }
        assert len(values) == 1


class TestRewardBatch:
    def test_order_aligned_response(self):
        samples = {s.id: s for s in (make_sample("a"), make_sample("b"))}
        request = {
            "samples": ["b", "a"],
            "answers": [samples["b"].ground_truth, "no images here"],
        }
        response = reward_batch(samples, request, ConstantProvider())
        assert len(response["rewards"]) == 2
        assert response["rewards"][0] == pytest.approx(1.0)
        assert response["rewards"][1] < 1.0

    def test_unknown_sample_id(self):
        with pytest.raises(InvariantError, match="ghost"):
            reward_batch(
                {"a": make_sample("a")},
                {"samples": ["ghost"], "answers": ["x"]},
                ConstantProvider(),
            )

    def test_length_mismatch(self):
        with pytest.raises(InvariantError):
            reward_batch(
                {"a": make_sample("a")},
                {"samples": ["a"], "answers": []},
                ConstantProvider(),
            )
