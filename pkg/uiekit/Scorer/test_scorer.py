import json
import random

import pytest

from ..Base.utils import write_jsonl
from ..Dataset.Corpus import CorpusRecord
from ..Records.ExtractionRecord import Entity, Event, Relation
from ..Records.OutputParser import canonicalize, render_completion
from ..Schema.UnifiedSchema import compile_schema
from .Exceptions import SubtaskRequired
from .MicroF1 import MatchCounts, MetricRow, count_matches, micro_f1
from .Report import build_report, merge_reports, score_files

NER = compile_schema({"classes": ["PER", "LOC"]}, "NER", "toy-ner")
RE = compile_schema({"classes": ["work_for", "live_in"]}, "RE", "toy-re")
EE = compile_schema({"Attack": ["attacker", "victim"], "Transfer": ["giver"]}, "EE", "toy-ee")
SPANS = ["A", "B", "C"]


def oracle(pred_units, gold_units):
    remaining = list(gold_units)
    tp = 0
    for unit in pred_units:
        if unit in remaining:
            remaining.remove(unit)
            tp += 1
    return MatchCounts(tp, len(pred_units) - tp, len(gold_units) - tp)


def random_side(rng, task):
    out = []
    for _ in range(rng.randint(0, 5)):
        if task == "NER":
            out.append(Entity(rng.choice(SPANS), rng.choice(["PER", "LOC"])))
        elif task == "RE":
            out.append(Relation(rng.choice(SPANS), rng.choice(["work_for", "live_in"]), rng.choice(SPANS)))
        else:
            roles = rng.sample(["attacker", "victim"], rng.randint(0, 2))
            out.append(Event("Attack", rng.choice(SPANS), tuple(sorted((r, rng.choice(SPANS)) for r in roles))))
    return out


def units(records, task, subtask=None):
    out = []
    for r in records:
        if task == "NER":
            out.append((r.mention, r.class_id))
        elif task == "RE":
            out.append((r.subject, r.relation, r.object))
        elif subtask == "trigger":
            out.append((r.class_id, r.trigger))
        else:
            out.extend((r.class_id, role, span) for role, span in r.arguments)
    return out


def test_count_matches_example():
    pred = [Entity("A", "PER")]
    gold = [Entity("A", "PER"), Entity("B", "LOC")]
    assert count_matches(pred, gold, "NER") == MatchCounts(1, 0, 1)
    assert count_matches(gold, gold, "NER") == MatchCounts(2, 0, 0)
    assert count_matches([], [], "NER") == MatchCounts(0, 0, 0)


def test_count_matches_duplicates_use_min():
    pred = [Entity("A", "PER"), Entity("A", "PER")]
    assert count_matches(pred, [Entity("A", "PER")], "NER") == MatchCounts(1, 1, 0)


@pytest.mark.parametrize("task,subtasks", [("NER", [None]), ("RE", [None]), ("EE", ["trigger", "argument"])])
def test_count_matches_agrees_with_oracle(task, subtasks):
    rng = random.Random(len(task) + len(subtasks))
    for _ in range(1000):
        pred, gold = random_side(rng, task), random_side(rng, task)
        for sub in subtasks:
            assert count_matches(pred, gold, task, sub) == oracle(units(pred, task, sub), units(gold, task, sub))


def test_subtask_required():
    with pytest.raises(SubtaskRequired):
        count_matches([], [], "EE")
    with pytest.raises(SubtaskRequired):
        count_matches([], [], "NER", "trigger")


def test_micro_f1_formula():
    row = micro_f1([MatchCounts(1, 0, 1)])
    assert (row.precision, row.recall) == (1.0, 0.5)
    assert row.f1 == pytest.approx(2 / 3, abs=1e-12)
    assert micro_f1([MatchCounts(4, 0, 0)]).f1 == 1.0
    zero = micro_f1([MatchCounts(0, 0, 0)])
    assert (zero.precision, zero.recall, zero.f1, zero.degenerate) == (0.0, 0.0, 0.0, True)
    assert micro_f1([]).degenerate


def test_micro_f1_randomized_and_permutation_invariant():
    rng = random.Random(1)
    for _ in range(1000):
        counts = [MatchCounts(rng.randint(0, 5), rng.randint(0, 5), rng.randint(0, 5)) for _ in range(4)]
        tp = sum(c.tp for c in counts)
        fp = sum(c.fp for c in counts)
        fn = sum(c.fn for c in counts)
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * p * r / (p + r) if p + r else 0.0
        row = micro_f1(counts)
        assert abs(row.f1 - f1) < 1e-12
        assert 0.0 <= row.f1 <= 1.0
        assert (row.f1 == 1.0) == (tp > 0 and fp == 0 and fn == 0)
        shuffled = counts[:]
        rng.shuffle(shuffled)
        assert micro_f1(shuffled) == row


def test_negative_counts_rejected():
    with pytest.raises(ValueError):
        MatchCounts(-1, 0, 0)


def test_report_sorted_by_dataset():
    rows = [micro_f1([MatchCounts(1, 0, 0)], name, "NER") for name in ("wnut", "conll", "ace")]
    report = build_report(rows)
    assert [r.dataset for r in report.rows] == ["ace", "conll", "wnut"]
    lines = report.to_text().strip().splitlines()
    assert len(lines) == 4
    assert "100.00" in lines[1]


def test_report_ee_two_rows_and_empty():
    rows = [micro_f1([MatchCounts(1, 1, 0)], "casie", "EE", "argument"),
            micro_f1([MatchCounts(2, 0, 0)], "casie", "EE", "trigger")]
    report = build_report(rows)
    assert [r.subtask for r in report.rows] == ["trigger", "argument"]
    empty = build_report([])
    assert len(empty) == 0
    assert empty.to_text().strip().splitlines() == ["dataset  task  subtask  precision  recall  f1"]
    assert empty.to_json()["rows"] == []


def test_score_files_and_merge(tmp_path):
    gold_records = [
        CorpusRecord("n1", "A met B.", NER, canonicalize([Entity("A", "PER"), Entity("B", "PER")], NER),
                     "toy-ner"),
        CorpusRecord("e1", "A hit B.", EE, canonicalize([Event("Attack", "hit", (("attacker", "A"),))], EE),
                     "toy-ee"),
    ]
    gold_path = tmp_path / "gold.jsonl"
    write_jsonl(str(gold_path), [r.to_json() for r in gold_records], fmt="corpus")
    preds = [
        {"id": "n1", "records": [{"type": "PER", "mention": "A"}]},
        {"id": "e1", "completion": render_completion("find the attack", gold_records[1].gold)},
        {"id": "zz", "records": []},
    ]
    pred_path = tmp_path / "pred.jsonl"
    write_jsonl(str(pred_path), preds)

    report = score_files(str(pred_path), str(gold_path))
    by_key = {(r.dataset, r.subtask): r for r in report.rows}
    assert by_key[("toy-ner", "-")].recall == 0.5
    assert by_key[("toy-ee", "trigger")].f1 == 1.0
    assert by_key[("toy-ee", "argument")].f1 == 1.0

    only_ner = score_files(str(pred_path), str(gold_path), task="ner")
    assert [r.task for r in only_ner.rows] == ["NER"]

    _, json_path = report.save(str(tmp_path / "a"))
    only_ner.save(str(tmp_path / "b"))
    merged = merge_reports([json_path, str(tmp_path / "b" / "report.json")])
    assert len(merged) == 3
    with open(json_path, encoding="utf-8") as f:
        assert MetricRow.from_json(json.load(f)["rows"][0]) == report.rows[0]
