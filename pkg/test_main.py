import json
import os

from main import main
from uiekit.Base.utils import read_json, read_jsonl
from uiekit.Schema.UnifiedSchema import schema_from_json

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")
CONFIG = os.path.join(FIXTURES, "config.json")
MOCK = os.path.join(FIXTURES, "mock.json")


def fixture(name):
    return os.path.join(FIXTURES, name)


def run(*argv):
    return main([str(a) for a in argv])


def test_usage_errors_exit_two(tmp_path):
    assert run("nonsense") == 2
    assert run("score", "--pred", "p.jsonl") == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"reward": {"lambda1": 0.5}}), encoding="utf-8")
    assert run("report", "--inputs", "x.json", "--config", bad) == 2


def test_runtime_error_exits_one(tmp_path):
    assert run("score", "--pred", tmp_path / "missing.jsonl", "--gold", tmp_path / "missing.jsonl") == 1


def test_schema_compile_matches_bundled_schemas(tmp_path):
    out = tmp_path / "schemas.json"
    assert run("schema", "compile", "--input", fixture("raw_schemas.json"), "--out", out) == 0
    compiled = [schema_from_json(o) for o in read_json(str(out))]
    bundled = [schema_from_json(o) for o in read_json(fixture("schemas.json"))]
    assert compiled == bundled


def test_build_reasoning_is_deterministic(tmp_path):
    outputs = []
    for name in ("a", "b"):
        out = tmp_path / name / "reasoning.jsonl"
        status = run("build-reasoning", "--corpus", fixture("mini_corpus.jsonl"), "--schemas", fixture("schemas.json"),
                     "--mock", MOCK, "--cache-dir", tmp_path / name / "cache", "--config", CONFIG, "--out", out)
        assert status == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]

    _, rows = read_jsonl(str(tmp_path / "a" / "reasoning.jsonl"))
    assert len(rows) == 20
    assert all(r["n_strategies"] == 15 and r["n_sampled"] == 5 for r in rows)
    assert all(r["level"] == len(r["traces"]) for r in rows)
    assert all((r["route"] == "SFT") == (r["level"] >= 3) for r in rows)
    by_id = {r["id"]: r for r in rows}
    assert (by_id["n01"]["level"], by_id["n01"]["route"]) == (5, "SFT")
    assert (by_id["n03"]["level"], by_id["n03"]["route"]) == (0, "RL")
    assert os.path.exists(tmp_path / "a" / "levels.json")


def test_full_pipeline(tmp_path):
    common = ["--config", CONFIG, "--cache-dir", tmp_path / "cache"]
    corpus = tmp_path / "corpus.jsonl"
    assert run("curate", "--input", fixture("mini_corpus.jsonl"), "--schemas", fixture("schemas.json"),
               "--out", corpus, "--base-sft", tmp_path / "base_sft.jsonl", *common) == 0
    reasoning = tmp_path / "reasoning.jsonl"
    assert run("build-reasoning", "--corpus", corpus, "--mock", MOCK, "--out", reasoning, *common) == 0
    assert run("render-sft", "--reasoning", reasoning, "--out", tmp_path / "sft.jsonl", *common) == 0
    assert run("route", "--reasoning", reasoning, "--out", tmp_path / "routed", *common) == 0
    assert run("grpo", "sim", "--pool", tmp_path / "routed" / "rl.jsonl", "--steps", 20,
               "--out", tmp_path / "grpo", *common) == 0
    assert run("score", "--pred", tmp_path / "grpo" / "predictions.jsonl", "--gold", tmp_path / "routed" / "rl.jsonl",
               "--out", tmp_path / "report", *common) == 0
    assert run("report", "--inputs", tmp_path / "report" / "report.json", "--out", tmp_path / "merged", *common) == 0

    for path in ("corpus.jsonl", "base_sft.jsonl", "reasoning.jsonl", "levels.json", "sft.jsonl",
                 "routed/sft.jsonl", "routed/rl.jsonl", "routed/strategies.jsonl", "grpo/rollouts.jsonl",
                 "grpo/dynamics.csv", "grpo/dynamics.json", "grpo/predictions.jsonl", "report/report.txt",
                 "report/report.json", "merged/report.txt"):
        assert os.path.exists(tmp_path / path), path

    header, samples = read_jsonl(str(tmp_path / "sft.jsonl"))
    assert header["format"] == "reasoning-sft"
    assert header["config"]["forge"]["p"] == 5
    hidden = [s for s in samples if s["hidden"]]
    assert len(hidden) == -(-(len(samples) - len(hidden)) // 10)
    assert len(read_json(str(tmp_path / "grpo" / "dynamics.json"))) == 20


def test_rerun_does_not_accumulate_stats(tmp_path):
    common = ["--config", CONFIG, "--cache-dir", tmp_path / "cache"]
    snapshots = []
    for _ in range(2):
        assert run("curate", "--input", fixture("mini_corpus.jsonl"), "--schemas", fixture("schemas.json"),
                   "--out", tmp_path / "corpus.jsonl", *common) == 0
        assert run("build-reasoning", "--corpus", tmp_path / "corpus.jsonl", "--mock", MOCK,
                   "--out", tmp_path / "reasoning.jsonl", *common) == 0
        snapshots.append((tmp_path / "stats.json").read_bytes())
    assert snapshots[0] == snapshots[1]
    stats = read_json(str(tmp_path / "stats.json"))
    assert stats["counters"]["curate"]["read"] == 20
    _, rows = read_jsonl(str(tmp_path / "reasoning.jsonl"))
    assert stats["counters"]["build-reasoning"]["instances"] == len(rows)
    assert sum(sum(levels.values()) for levels in stats["levels"].values()) == len(rows)
