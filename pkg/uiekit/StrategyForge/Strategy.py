from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from ..Records.ExtractionRecord import records_from_json, records_to_json
from .Exceptions import InvalidParadigms

OTHER = 0


class AnalyticalDimension(str, Enum):
    COGNITIVE = "cognitive"
    ROLE = "role"
    HEURISTIC = "heuristic"


DIMENSIONS = tuple(AnalyticalDimension)


@dataclass(frozen=True)
class Strategy:
    text: str
    dimension: AnalyticalDimension
    paradigm_id: Optional[int] = None

    def __post_init__(self):
        if not self.text or not self.text.strip():
            raise ValueError("strategy 文本不能为空")
        object.__setattr__(self, "dimension", AnalyticalDimension(self.dimension))

    def with_paradigm(self, paradigm_id):
        return replace(self, paradigm_id=paradigm_id)

    def to_json(self):
        return {"text": self.text, "dimension": self.dimension.value, "paradigm_id": self.paradigm_id}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["text"], AnalyticalDimension(obj["dimension"]), obj.get("paradigm_id"))


@dataclass(frozen=True)
class Paradigm:
    paradigm_id: int
    keywords: tuple
    name: str = ""

    def __post_init__(self):
        keywords = tuple(self.keywords or ())
        if not isinstance(self.paradigm_id, int) or self.paradigm_id <= OTHER:
            raise InvalidParadigms(f"paradigm id 必须是正整数: {self.paradigm_id!r}")
        if not keywords:
            raise InvalidParadigms(f"paradigm {self.paradigm_id} 没有关键词")
        for k in keywords:
            if not isinstance(k, str) or not k.strip() or k != k.lower():
                raise InvalidParadigms(f"paradigm {self.paradigm_id} 的关键词必须是小写非空字符串: {k!r}")
        if len(set(keywords)) != len(keywords):
            raise InvalidParadigms(f"paradigm {self.paradigm_id} 的关键词重复")
        object.__setattr__(self, "keywords", keywords)

    @classmethod
    def from_json(cls, obj):
        return cls(obj.get("id", obj.get("paradigm_id")), tuple(obj.get("keywords") or ()), obj.get("name", ""))

    def to_json(self):
        return {"id": self.paradigm_id, "name": self.name, "keywords": list(self.keywords)}


@dataclass
class StrategyCluster:
    paradigm_id: int
    members: list = field(default_factory=list)

    @property
    def is_other(self):
        return self.paradigm_id == OTHER

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class ReasoningTrace:
    strategy: Strategy
    cot: str
    prediction: tuple = ()
    correct: bool = False
    error: Optional[str] = None

    def to_json(self):
        return {
            "strategy": self.strategy.to_json(),
            "cot": self.cot,
            "prediction": records_to_json(self.prediction),
            "correct": self.correct,
            "error": self.error,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(Strategy.from_json(obj["strategy"]), obj.get("cot", ""),
                   tuple(records_from_json(obj.get("prediction"))), bool(obj.get("correct")), obj.get("error"))
