import os
import random
import subprocess
import sys

import pytest

from ..Records.ExtractionRecord import Entity, Event, Relation
from .Exceptions import DuplicateClass, EmptySchema, MalformedJson, MissingArguments, SchemaViolation
from .UnifiedSchema import (
    TaskKind,
    compile_schema,
    make_class,
    parse_schema,
    schema_stats,
    serialize_schema,
    validate_output,
)

CASIE_LIKE = {
    "Attack": ["attacker", "victim", "tool", "time", "place"],
    "Breach": ["attacker", "victim", "data", "number", "time", "place"],
    "Phishing": ["attacker", "victim", "trusted-entity", "purpose", "time"],
    "Ransom": ["attacker", "victim", "payment", "price", "time"],
    "Vulnerability": ["vulnerability", "system", "version", "time", "discoverer"],
}

ALPHABET = "abcdefgXYZ 的了在人中国語 éü"


def random_schema(rng):
    task = rng.choice(list(TaskKind))
    n = rng.randint(1, 5)
    labels = [f"L{i}_{rng.randint(0, 999)}" for i in range(n)]
    classes = []
    for label in labels:
        desc = "".join(rng.choice(ALPHABET) for _ in range(rng.randint(0, 12)))
        if task == TaskKind.EE:
            args = [f"r{j}" for j in range(rng.randint(1, 4))]
        else:
            args = []
        classes.append({"class": label, "arguments": args, "description": desc})
    return compile_schema({"classes": classes}, task, source_name=rng.choice(["", "toy", "数据集"]))


def ee_toy():
    return compile_schema({"Attack": ["attacker", "victim"], "Transfer": ["giver", "recipient"]}, "EE")


def test_compile_ner_four_classes():
    s = compile_schema({"classes": ["PER", "LOC", "ORG", "MISC"]}, TaskKind.NER, "CoNLL2003")
    assert s.task == TaskKind.NER
    assert len(s.classes) == 4
    assert all(c.arguments == () for c in s.classes)
    assert s.source_name == "CoNLL2003"


def test_compile_ee_counts_roles():
    s = compile_schema({"events": CASIE_LIKE}, "EE", "CASIE")
    assert len(s.classes) == 5
    assert sum(len(c.arguments) for c in s.classes) == 26
    assert schema_stats(s)["notation"] == "5(26)"


def test_compile_re_fixes_arguments():
    s = compile_schema({"relations": [{"name": "work_for", "roles": ["head", "tail"]}]}, "RE")
    assert s.classes[0].arguments == ("subject", "object")


def test_compile_is_idempotent():
    s = compile_schema({"events": CASIE_LIKE}, "EE", "CASIE")
    assert compile_schema(s) == s
    assert compile_schema(s.to_json()) == s
    assert compile_schema(compile_schema(s.to_json())) == s


def test_compile_errors():
    with pytest.raises(EmptySchema):
        compile_schema({"classes": []}, "NER")
    with pytest.raises(DuplicateClass):
        compile_schema({"classes": ["PER", "LOC", "PER"]}, "NER")
    with pytest.raises(DuplicateClass):
        compile_schema({"classes": ["PER", "per"]}, "NER")
    with pytest.raises(MissingArguments):
        compile_schema({"Attack": ["attacker"], "Breach": []}, "EE")


def test_descriptor_defaults_to_empty_and_labels_verbatim():
    s = compile_schema({"classes": ["geo-Political Entity"]}, "NER")
    assert s.classes[0].descriptor == ""
    assert s.classes[0].class_id == "geo-Political Entity"


def test_serialize_is_deterministic():
    a = compile_schema({"classes": [{"class": "PER", "description": "人名"}]}, "NER", "x")
    b = compile_schema({"classes": [{"description": "人名", "name": "PER"}]}, "NER", "x")
    assert serialize_schema(a) == serialize_schema(b)
    assert serialize_schema(a).encode("utf-8") == serialize_schema(b).encode("utf-8")


def test_random_schemas_round_trip():
    rng = random.Random(7)
    for _ in range(100):
        s = random_schema(rng)
        text = serialize_schema(s)
        back = parse_schema(text)
        assert back == s
        assert serialize_schema(back).encode("utf-8") == text.encode("utf-8")


def test_parse_rejects_bad_input():
    s = compile_schema({"classes": ["PER", "LOC"]}, "NER")
    text = serialize_schema(s)
    with pytest.raises(MalformedJson):
        parse_schema(text[:-5])
    dup = text.replace('"LOC"', '"PER"')
    with pytest.raises(SchemaViolation):
        parse_schema(dup)
    extra = text[:-1] + ',"version":2}'
    with pytest.raises(SchemaViolation):
        parse_schema(extra)
    with pytest.raises(SchemaViolation):
        parse_schema("[1, 2]")


def test_validate_unknown_class():
    s = compile_schema({"classes": ["PER"]}, "NER")
    report = validate_output([Entity("Paris", "LOC")], s)
    assert not report.valid
    assert report.reasons() == ["UnknownClass"]


def test_validate_empty_is_valid():
    s = compile_schema({"classes": ["PER"]}, "NER")
    assert validate_output([], s).valid


def test_validate_role_from_other_event():
    s = ee_toy()
    ok = Event("Attack", "bombed", (("attacker", "rebels"),))
    bad = Event("Attack", "bombed", (("giver", "rebels"),))
    assert validate_output([ok], s).valid
    report = validate_output([ok, bad], s)
    assert report.reasons() == ["UnknownArgument"]
    assert report.invalid_indices() == [1]


def test_validate_wrong_record_kind():
    s = compile_schema({"classes": ["PER"]}, "NER")
    report = validate_output([Relation("a", "PER", "b")], s)
    assert report.reasons() == ["WrongArity"]


def test_validate_rejects_every_off_schema_mutation():
    rng = random.Random(11)
    s = ee_toy()
    for i in range(100):
        cls = rng.choice(s.classes)
        args = tuple((role, f"span{j}") for j, role in enumerate(cls.arguments))
        good = Event(cls.class_id, "trig", args)
        assert validate_output([good], s).valid
        if i % 2:
            mutated = Event(f"Other{i}", "trig", args)
        else:
            mutated = Event(cls.class_id, "trig", args + ((f"role{i}", "x"),))
        assert not validate_output([good, mutated], s).valid


def test_make_class_rejects_duplicate_roles():
    with pytest.raises(Exception):
        make_class("Attack", ["a", "a"])


@pytest.mark.parametrize("module", ["uiekit.Schema", "uiekit.Records", "uiekit.Dataset", "uiekit.StrategyForge",
                                    "uiekit.Reward", "uiekit.Grpo", "uiekit.Scorer", "uiekit.Config"])
def test_package_imports_first_in_fresh_interpreter(module):
    root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
    done = subprocess.run([sys.executable, "-c", f"import {module}"], cwd=root, capture_output=True, text=True)
    assert done.returncode == 0, done.stderr
