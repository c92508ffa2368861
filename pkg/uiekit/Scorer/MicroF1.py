"""
Micro-F1：各实例的 tp / fp / fn 先求和，再算 P / R / F1。

匹配单元（多重集取 min 计数）：
    NER          (mention, class)
    RE           (subject, relation, object)
    EE trigger   (event class, trigger)
    EE argument  (event class, role, span)
"""
from collections import Counter
from dataclasses import dataclass

from ..Records.ExtractionRecord import Entity, Event, Relation
from ..Schema.UnifiedSchema import Subtask, TaskKind
from .Exceptions import SubtaskRequired

NO_SUBTASK = "-"


@dataclass(frozen=True)
class MatchCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn) < 0:
            raise ValueError(f"计数不能为负: {self}")

    def __add__(self, other):
        return MatchCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


@dataclass(frozen=True)
class MetricRow:
    dataset: str
    task: str
    subtask: str
    precision: float
    recall: float
    f1: float
    tp: int = 0
    fp: int = 0
    fn: int = 0
    # 分母为 0 时 P / R / F1 记 0 并标记
    degenerate: bool = False

    def to_json(self):
        return {"dataset": self.dataset, "task": self.task, "subtask": self.subtask,
                "precision": self.precision, "recall": self.recall, "f1": self.f1,
                "tp": self.tp, "fp": self.fp, "fn": self.fn, "degenerate": self.degenerate}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["dataset"], obj["task"], obj.get("subtask", NO_SUBTASK), float(obj["precision"]),
                   float(obj["recall"]), float(obj["f1"]), int(obj.get("tp", 0)), int(obj.get("fp", 0)),
                   int(obj.get("fn", 0)), bool(obj.get("degenerate", False)))


def _subtask(task, subtask):
    task = TaskKind(task)
    if subtask in (None, NO_SUBTASK):
        if task == TaskKind.EE:
            raise SubtaskRequired()
        return task, None
    if task != TaskKind.EE:
        raise SubtaskRequired(f"{task.value} 不接受子任务: {subtask}")
    return task, Subtask(subtask)


def match_units(records, task, subtask=None):
    task, subtask = _subtask(task, subtask)
    units = Counter()
    for r in records:
        if task == TaskKind.NER and isinstance(r, Entity):
            units[(r.mention, r.class_id)] += 1
        elif task == TaskKind.RE and isinstance(r, Relation):
            units[(r.subject, r.relation, r.object)] += 1
        elif task == TaskKind.EE and isinstance(r, Event):
            if subtask == Subtask.TRIGGER:
                units[(r.class_id, r.trigger)] += 1
            else:
                for role, span in r.arguments:
                    units[(r.class_id, role, span)] += 1
    return units


def count_matches(pred, gold, task, subtask=None):
    """
    Raises:
        SubtaskRequired: EE 没给子任务，或非 EE 给了子任务
    """
    p, g = match_units(pred, task, subtask), match_units(gold, task, subtask)
    tp = sum((p & g).values())
    return MatchCounts(tp, sum(p.values()) - tp, sum(g.values()) - tp)


def micro_f1(counts, dataset="", task="", subtask=NO_SUBTASK):
    total = sum(counts, MatchCounts())
    p_den, r_den = total.tp + total.fp, total.tp + total.fn
    precision = total.tp / p_den if p_den else 0.0
    recall = total.tp / r_den if r_den else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    degenerate = p_den == 0 or r_den == 0
    return MetricRow(dataset, getattr(task, "value", task), getattr(subtask, "value", subtask) or NO_SUBTASK,
                     precision, recall, f1, total.tp, total.fp, total.fn, degenerate)
