import asyncio

import pytest

from ..Base.StatsDataManager import StatsDataManager
from ..Base.utils import canonical_dumps
from ..Dataset.Corpus import RL, SFT, CorpusRecord
from ..Gateway.Exceptions import Exhausted, GatewayFailure, TransientGatewayError
from ..Gateway.GeneratorGateway import GeneratorGateway
from ..Gateway.Transports import MockTransport
from ..Records.ExtractionRecord import Entity
from ..Schema.UnifiedSchema import compile_schema
from .Convergence import load_paradigms
from .Prompts import DEFAULT_PARADIGMS
from .Strategy import AnalyticalDimension, Paradigm, Strategy
from .StrategyForge import StrategyForge, strategy_text

NER = compile_schema({"classes": ["PER", "LOC"]}, "NER", "toy")
X = "Barack Obama visited Paris."
GOLD = (Entity("Barack Obama", "PER"), Entity("Paris", "LOC"))
GOLD_COMPLETION = ('<think>Look for people and places.</think>'
                   '[{"type": "PER", "mention": "Barack Obama"}, {"type": "LOC", "mention": "Paris"}]')
WRONG_COMPLETION = '<think>Only people.</think>[{"type": "PER", "mention": "Barack Obama"}]'

PARADIGMS = [Paradigm(i + 1, (word,)) for i, word in enumerate(["alpha", "bravo", "charlie", "delta", "echo"])]
STRATEGY_RULES = [
    {"purpose": "strategy", "match": "dimension: cognitive", "responses": ["alpha one", "bravo one"]},
    {"purpose": "strategy", "match": "dimension: professional role", "responses": ["charlie one", "delta one"]},
    {"purpose": "strategy", "match": "dimension: heuristic", "responses": ["echo one", "echo two"]},
]


def record(rid="r1"):
    return CorpusRecord(rid, X, NER, GOLD, "toy")


def forge_with(correct_words, o=3, default=None, transport=None):
    rules = list(STRATEGY_RULES)
    if correct_words:
        rules.append({"purpose": "rationale", "match": "strategy:\\n(" + "|".join(correct_words) + ")",
                      "responses": [GOLD_COMPLETION]})
    rules.append({"purpose": "rationale", "match": ".", "responses": [default or WRONG_COMPLETION]})
    gateway = GeneratorGateway(transport or MockTransport(rules=rules), backoff_base=0)
    return StrategyForge(gateway, PARADIGMS, n_per_dim=2, p=5, o=o, seed=7)


def test_strategy_text():
    assert strategy_text("<think>hm</think>  Read twice.") == "Read twice."
    assert strategy_text("Read twice.") == "Read twice."
    assert strategy_text("<think>unclosed Read") == "unclosed Read"


@pytest.mark.parametrize("n", [1, 5])
def test_diverge_counts(n):
    forge = forge_with([])
    strategies = asyncio.run(forge.diverge(X, NER, n))
    assert len(strategies) == 3 * n
    for dim in AnalyticalDimension:
        assert sum(1 for s in strategies if s.dimension == dim) == n


def test_diverge_is_deterministic():
    a = asyncio.run(forge_with([]).diverge(X, NER, 2))
    b = asyncio.run(forge_with([]).diverge(X, NER, 2))
    assert a == b
    assert [s.text for s in a] == ["alpha one", "bravo one", "charlie one", "delta one", "echo one", "echo two"]


def test_diverge_retries_blank_then_skips():
    transport = MockTransport(rules=[
        # seed 0 为空，重试时 seed=1000 -> 1000 % 3 == 1
        {"purpose": "strategy", "match": "dimension: cognitive", "responses": ["   ", "cog text", "x"], "pick": "seed"},
        {"purpose": "strategy", "match": "dimension: heuristic", "responses": [""]},
        {"purpose": "strategy", "match": ".", "responses": ["role text"]},
    ])
    forge = StrategyForge(GeneratorGateway(transport), PARADIGMS, n_per_dim=1, blank_retries=1)
    strategies = asyncio.run(forge.diverge(X, NER))
    assert [s.text for s in strategies] == ["cog text", "role text"]


def test_generate_trace_correct_wrong_prose():
    strat = Strategy("alpha one", AnalyticalDimension.COGNITIVE)
    trace = asyncio.run(forge_with(["alpha"]).generate_trace(X, NER, strat, GOLD))
    assert trace.correct
    assert trace.cot == "Look for people and places."
    trace = asyncio.run(forge_with([]).generate_trace(X, NER, strat, GOLD))
    assert not trace.correct
    trace = asyncio.run(forge_with([], default="I am not sure.").generate_trace(X, NER, strat, GOLD))
    assert not trace.correct
    assert trace.error == "Unparseable"


@pytest.mark.parametrize("words,level,route", [
    (["alpha", "bravo", "charlie"], 3, SFT),
    (["alpha", "bravo"], 2, RL),
    ([], 0, RL),
])
def test_build_instance_levels(words, level, route):
    inst = asyncio.run(forge_with(words).build_instance(record()))
    assert inst.n_strategies == 6
    assert inst.n_sampled == 5
    assert inst.level == level
    assert inst.route == route
    assert len(inst.traces) == level
    assert all(t.correct for t in inst.traces)


def test_build_instance_reproducible():
    a = asyncio.run(forge_with(["alpha", "delta"]).build_instance(record()))
    b = asyncio.run(forge_with(["alpha", "delta"]).build_instance(record()))
    assert canonical_dumps(a.to_json()) == canonical_dumps(b.to_json())


def test_build_instance_default_paradigms_fifteen_strategies():
    transport = MockTransport(rules=[
        {"purpose": "strategy", "match": "cognitive", "pick": "seed",
         "responses": ["check entity types", "scan names first", "verify each span", "read twice", "find people"]},
        {"purpose": "strategy", "match": "role", "pick": "seed",
         "responses": ["as a journalist find names", "as an editor check spans", "as an analyst verify",
                       "as a lawyer list parties", "as a doctor find people"]},
        {"purpose": "strategy", "match": ".", "pick": "seed",
         "responses": ["capitalized words are names", "eliminate pronouns", "check the boundary",
                       "time words are not entities", "confirm type with context"]},
        {"purpose": "rationale", "match": ".", "responses": [GOLD_COMPLETION]},
    ])
    forge = StrategyForge(GeneratorGateway(transport), load_paradigms(DEFAULT_PARADIGMS), n_per_dim=5, p=5, o=3)
    inst = asyncio.run(forge.build_instance(record()))
    assert inst.n_strategies == 15
    assert inst.n_sampled == 5
    assert inst.level == 5
    assert inst.route == SFT


class DeadTransport:
    async def send(self, req):
        raise TransientGatewayError("down")


def test_gateway_failure_marks_incomplete(tmp_path):
    forge = forge_with([], transport=DeadTransport())
    forge.gateway.max_retries = 0
    with pytest.raises(GatewayFailure):
        asyncio.run(forge.build_instance(record()))
    assert issubclass(Exhausted, GatewayFailure)

    stats = StatsDataManager(str(tmp_path / "stats.json"))
    forge.stats = stats
    out = asyncio.run(forge.build_corpus([record("a"), record("b")]))
    assert out == []
    assert sorted(stats.incomplete()) == ["a", "b"]


def test_build_corpus_keeps_order_and_counts(tmp_path):
    stats = StatsDataManager(str(tmp_path / "stats.json"))
    forge = forge_with(["alpha", "bravo", "charlie"])
    forge.stats = stats
    out = asyncio.run(forge.build_corpus([record("a"), record("b"), record("c")]))
    assert [i.id for i in out] == ["a", "b", "c"]
    assert stats.get_count("build-reasoning", "instances") == 3
    assert stats.data["levels"]["NER"] == {"3": 3}
