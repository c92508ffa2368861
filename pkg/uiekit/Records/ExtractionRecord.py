"""
抽取结果的统一表示：实体 / 关系三元组 / 事件。

JSON 形状（逐字节固定）：
    Entity   {"type": ..., "mention": ...}
    Relation {"relation": ..., "subject": ..., "object": ...}
    Event    {"event": ..., "trigger": ..., "arguments": {role: span, ...}}
同一角色有多个 span 时 arguments 的值写成列表。
"""
from dataclasses import dataclass
from typing import Union

ENTITY = "entity"
RELATION = "relation"
EVENT = "event"


@dataclass(frozen=True)
class Entity:
    mention: str
    class_id: str

    @property
    def kind(self):
        return ENTITY

    def to_json(self):
        return {"type": self.class_id, "mention": self.mention}

    def sort_key(self):
        return (0, self.class_id, self.mention)

    def spans(self):
        return (self.mention,)

    def label(self):
        return self.class_id

    def roles(self):
        return ()


@dataclass(frozen=True)
class Relation:
    subject: str
    relation: str
    object: str

    @property
    def kind(self):
        return RELATION

    def to_json(self):
        return {"relation": self.relation, "subject": self.subject, "object": self.object}

    def sort_key(self):
        return (1, self.relation, self.subject, self.object)

    def spans(self):
        return (self.subject, self.object)

    def label(self):
        return self.relation

    def roles(self):
        return ()


@dataclass(frozen=True)
class Event:
    class_id: str
    trigger: str
    # ((role, span), ...)，按 (role, span) 去重
    arguments: tuple = ()

    @property
    def kind(self):
        return EVENT

    def to_json(self):
        grouped = {}
        for role, span in self.arguments:
            grouped.setdefault(role, []).append(span)
        args = {role: spans[0] if len(spans) == 1 else spans for role, spans in grouped.items()}
        return {"event": self.class_id, "trigger": self.trigger, "arguments": args}

    def sort_key(self):
        return (2, self.class_id, self.trigger, self.arguments)

    def spans(self):
        return (self.trigger,) + tuple(span for _, span in self.arguments)

    def label(self):
        return self.class_id

    def roles(self):
        return tuple(role for role, _ in self.arguments)


ExtractionRecord = Union[Entity, Relation, Event]


def _require_str(obj, key):
    value = obj.get(key)
    if not isinstance(value, str) or not value.strip():
        raise ValueError(f"字段 {key} 缺失或为空: {obj}")
    return value


def _decode_arguments(raw):
    if raw is None:
        return ()
    pairs = []
    if isinstance(raw, dict):
        for role, spans in raw.items():
            if isinstance(spans, str):
                spans = [spans]
            if not isinstance(spans, list):
                raise ValueError(f"论元 {role} 的值必须是字符串或列表")
            for span in spans:
                if not isinstance(span, str) or not span.strip():
                    raise ValueError(f"论元 {role} 的 span 为空")
                pairs.append((role, span))
    elif isinstance(raw, list):
        for item in raw:
            if not isinstance(item, dict):
                raise ValueError(f"论元格式不对: {item}")
            role = item.get("role")
            span = item.get("span", item.get("argument"))
            if not isinstance(role, str) or not isinstance(span, str) or not span.strip():
                raise ValueError(f"论元格式不对: {item}")
            pairs.append((role, span))
    else:
        raise ValueError(f"arguments 必须是对象或列表: {raw}")
    for role, _ in pairs:
        if not role.strip():
            raise ValueError("论元角色为空")
    return tuple(dict.fromkeys(pairs))


def record_from_json(obj):
    """按 JSON 的键判断记录种类；形状不对时抛 ValueError"""
    if not isinstance(obj, dict):
        raise ValueError(f"记录必须是 JSON 对象: {obj!r}")
    if "event" in obj:
        return Event(_require_str(obj, "event"), _require_str(obj, "trigger"),
                     _decode_arguments(obj.get("arguments")))
    if "relation" in obj:
        return Relation(_require_str(obj, "subject"), _require_str(obj, "relation"),
                        _require_str(obj, "object"))
    if "mention" in obj:
        return Entity(_require_str(obj, "mention"), _require_str(obj, "type"))
    raise ValueError(f"无法识别的记录: {obj}")


def records_from_json(items):
    return [record_from_json(item) for item in (items or [])]


def records_to_json(records):
    return [record.to_json() for record in records]

