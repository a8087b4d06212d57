from __future__ import annotations

import json

import pytest

from ileval.cli import run
from ileval.corpus import write_corpus
from ileval.evaluator import load_report

from conftest import build_fixture, make_sample, write_jsonl


@pytest.fixture
def workspace(tmp_path):
    samples = [make_sample(f"s{i}", image_count=2) for i in range(3)]
    answers = {
        "s0": samples[0].ground_truth,
        "s1": "Cats nap often but no pictures.",
        "s2": "broken ![x](IMG#1",
    }
    corpus_path = tmp_path / "corpus.jsonl"
    answers_path = tmp_path / "answers.jsonl"
    fixture_path = tmp_path / "fixture.json"
    write_corpus(samples, corpus_path)
    write_jsonl(answers_path, [{"id": k, "answer": v} for k, v in answers.items()])
    fixture_path.write_text(
        json.dumps(build_fixture(samples, answers, pair_value=1.0)), encoding="utf-8"
    )
    return tmp_path, corpus_path, answers_path, fixture_path


class TestEvaluateCommand:
    def test_writes_report_and_exits_zero(self, workspace):
        tmp_path, corpus, answers, fixture = workspace
        out = tmp_path / "report.json"
        code = run(
            [
                "evaluate",
                "--corpus", str(corpus),
                "--answers", str(answers),
                "--mock-fixture", str(fixture),
                "--out", str(out),
            ]
        )
        assert code == 0
        report = load_report(out)
        assert len(report.per_sample) == 3
        assert report.invalid_format_count == 1

    def test_csv_format(self, workspace):
        tmp_path, corpus, answers, fixture = workspace
        out = tmp_path / "report.csv"
        code = run(
            [
                "evaluate",
                "--corpus", str(corpus),
                "--answers", str(answers),
                "--mock-fixture", str(fixture),
                "--out", str(out),
                "--format", "csv",
            ]
        )
        assert code == 0
        assert out.read_text().splitlines()[-1].startswith("aggregate,")

    def test_missing_corpus_exits_one_naming_path(self, workspace, capsys):
        tmp_path, _, answers, fixture = workspace
        code = run(
            [
                "evaluate",
                "--corpus", str(tmp_path / "ghost.jsonl"),
                "--answers", str(answers),
                "--mock-fixture", str(fixture),
                "--out", str(tmp_path / "r.json"),
            ]
        )
        assert code == 1
        assert "ghost.jsonl" in capsys.readouterr().err

    def test_both_provider_flags_rejected(self, workspace):
        tmp_path, corpus, answers, fixture = workspace
        code = run(
            [
                "evaluate",
                "--corpus", str(corpus),
                "--answers", str(answers),
                "--mock-fixture", str(fixture),
                "--provider-endpoint", "http://localhost:9",
                "--out", str(tmp_path / "r.json"),
            ]
        )
        assert code == 1

    def test_unreachable_endpoint_exits_two(self, workspace, monkeypatch):
        tmp_path, corpus, answers, _ = workspace
        monkeypatch.delenv("ILEVAL_PROVIDER_ENDPOINT", raising=False)
        code = run(
            [
                "evaluate",
                "--corpus", str(corpus),
                "--answers", str(answers),
                "--provider-endpoint", "http://127.0.0.1:1/nothing",
                "--out", str(tmp_path / "r.json"),
            ]
        )
        assert code == 2

    def test_endpoint_env_override(self, workspace, monkeypatch):
        tmp_path, corpus, answers, _ = workspace
        monkeypatch.setenv("ILEVAL_PROVIDER_ENDPOINT", "http://127.0.0.1:1/nothing")
        code = run(
            [
                "evaluate",
                "--corpus", str(corpus),
                "--answers", str(answers),
                "--out", str(tmp_path / "r.json"),
            ]
        )
        assert code == 2  # reached the (dead) endpoint instead of failing flag checks


class TestParseCommand:
    def test_malformed_answer_is_data_not_error(self, tmp_path, capsys):
        answer_path = tmp_path / "bad.md"
        answer_path.write_text("broken ![x](IMG#1", encoding="utf-8")
        code = run(["parse", "--answer-file", str(answer_path), "--image-count", "3"])
        assert code == 0
        dump = json.loads(capsys.readouterr().out)
        assert dump["flags"]["invalid_format"] is True

    def test_envelope_fields_surfaced(self, tmp_path, capsys):
        answer_path = tmp_path / "enveloped.json"
        answer_path.write_text(
            json.dumps(
                {"reason": "r", "category": "what-is", "answer": "a ![x](IMG#1)"}
            ),
            encoding="utf-8",
        )
        code = run(["parse", "--answer-file", str(answer_path), "--image-count", "1"])
        assert code == 0
        dump = json.loads(capsys.readouterr().out)
        assert dump["category"] == "what-is"
        assert dump["image_refs"][0]["index"] == 1


class TestCorrelateCommand:
    def test_correlation_table_emitted(self, workspace, capsys):
        tmp_path, corpus, answers, fixture = workspace
        out = tmp_path / "report.json"
        assert run(
            [
                "evaluate",
                "--corpus", str(corpus),
                "--answers", str(answers),
                "--mock-fixture", str(fixture),
                "--out", str(out),
            ]
        ) == 0
        human_path = tmp_path / "human.jsonl"
        write_jsonl(
            human_path,
            [
                {"id": f"s{i}", "image_quality": float(i), "consistency": 2.0 - i, "overall": float(i)}
                for i in range(3)
            ],
        )
        code = run(
            ["correlate", "--report", str(out), "--human", str(human_path)]
        )
        assert code == 0
        rows = json.loads(capsys.readouterr().out)
        assert {row["dimension"] for row in rows} == {
            "image_quality",
            "consistency",
            "overall",
        }


class TestRewardCommand:
    def test_rewards_jsonl_emitted(self, workspace, capsys):
        tmp_path, corpus, answers, fixture = workspace
        code = run(
            [
                "reward",
                "--corpus", str(corpus),
                "--answers", str(answers),
                "--mock-fixture", str(fixture),
            ]
        )
        assert code == 0
        lines = [json.loads(l) for l in capsys.readouterr().out.strip().splitlines()]
        by_id = {row["id"]: row["reward"] for row in lines}
        assert by_id["s0"] == pytest.approx(1.0)
        assert by_id["s2"] == 0.0  # invalid format gated

    def test_custom_weights(self, workspace, capsys):
        tmp_path, corpus, answers, fixture = workspace
        code = run(
            [
                "reward",
                "--corpus", str(corpus),
                "--answers", str(answers),
                "--mock-fixture", str(fixture),
                "--reward-weights", "1,0,0,0,0",
            ]
        )
        assert code == 0
        lines = [json.loads(l) for l in capsys.readouterr().out.strip().splitlines()]
        by_id = {row["id"]: row["reward"] for row in lines}
        assert by_id["s0"] == pytest.approx(1.0)

    def test_bad_weights_exit_one(self, workspace):
        tmp_path, corpus, answers, fixture = workspace
        code = run(
            [
                "reward",
                "--corpus", str(corpus),
                "--answers", str(answers),
                "--mock-fixture", str(fixture),
                "--reward-weights", "1,1,1,1,1",
            ]
        )
        assert code == 1


class TestRenderCommand:
    def test_urls_substituted(self, tmp_path, capsys):
        answer_path = tmp_path / "answer.md"
        answer_path.write_text("see ![a cat](IMG#1) here", encoding="utf-8")
        url_map_path = tmp_path / "urls.json"
        url_map_path.write_text(json.dumps({"1": "http://x/1.jpg"}), encoding="utf-8")
        code = run(
            ["render", "--answer-file", str(answer_path), "--url-map", str(url_map_path)]
        )
        assert code == 0
        assert capsys.readouterr().out.strip() == "see ![a cat](http://x/1.jpg) here"
