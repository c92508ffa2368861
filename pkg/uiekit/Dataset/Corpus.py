"""
语料记录与推理实例（JSONL 里的字段名与这里一一对应）
"""
from dataclasses import dataclass, field

from ..Records.ExtractionRecord import records_from_json, records_to_json
from ..Records.OutputParser import THINK_CLOSE, THINK_OPEN, render_answer
from ..Schema.UnifiedSchema import UnifiedSchema, schema_from_json

SFT = "SFT"
RL = "RL"

TRAIN = "train"
SPLITS = ("train", "val", "test")


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    x: str
    schema_ref: UnifiedSchema
    gold: tuple = ()
    source: str = ""
    split: str = TRAIN

    @property
    def task(self):
        return self.schema_ref.task

    def to_json(self):
        return {
            "id": self.id,
            "x": self.x,
            "schema_ref": self.schema_ref.to_json(),
            "gold": records_to_json(self.gold),
            "source": self.source,
            "split": self.split,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(str(obj["id"]), obj["x"], schema_from_json(obj["schema_ref"]),
                   tuple(records_from_json(obj.get("gold"))), obj.get("source", ""), obj.get("split", TRAIN))


def segment_offsets(cot, answer):
    """<think>cot</think>answer 中 cot 与结构化答案的字符区间 [start, end)"""
    cot_start = len(THINK_OPEN)
    cot_end = cot_start + len(cot)
    struct_start = cot_end + len(THINK_CLOSE)
    return (cot_start, cot_end), (struct_start, struct_start + len(answer))


@dataclass
class ReasoningInstance:
    record: CorpusRecord
    traces: list = field(default_factory=list)
    level: int = 0
    route: str = RL
    n_strategies: int = 0
    n_sampled: int = 0

    @property
    def id(self):
        return self.record.id

    @property
    def task(self):
        return self.record.task

    def segments(self):
        out = []
        for trace in self.traces:
            cot, struct = segment_offsets(trace.cot, render_answer(trace.prediction))
            out.append({"cot": list(cot), "struct": list(struct)})
        return out

    def to_json(self):
        obj = self.record.to_json()
        obj.update({
            "traces": [t.to_json() for t in self.traces],
            "level": self.level,
            "route": self.route,
            "segments": self.segments(),
            "n_strategies": self.n_strategies,
            "n_sampled": self.n_sampled,
        })
        return obj

    @classmethod
    def from_json(cls, obj):
        from ..StrategyForge.Strategy import ReasoningTrace

        return cls(CorpusRecord.from_json(obj), [ReasoningTrace.from_json(t) for t in obj.get("traces", [])],
                   int(obj.get("level", 0)), obj.get("route", RL), int(obj.get("n_strategies", 0)),
                   int(obj.get("n_sampled", 0)))
