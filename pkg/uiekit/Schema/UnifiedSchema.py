"""
统一 schema：把 NER / RE / EE 各自的标签体系编译成同一种 JSON 结构

    {"task": "EE",
     "classes": [{"class": c_i, "arguments": [a_i ...], "description": d_i}],
     "source": "CASIE"}

序列化是确定性的（sorted keys），parse_schema(serialize_schema(s)) == s。
"""
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..Base.utils import canonical_dumps
from ..Records.ExtractionRecord import Entity, Event, Relation
from .Exceptions import DuplicateClass, EmptySchema, MalformedJson, MissingArguments, SchemaViolation


class TaskKind(str, Enum):
    NER = "NER"
    RE = "RE"
    EE = "EE"


class Subtask(str, Enum):
    TRIGGER = "trigger"
    ARGUMENT = "argument"


RE_ARGUMENTS = ("subject", "object")
EXPECTED_RECORD = {TaskKind.NER: Entity, TaskKind.RE: Relation, TaskKind.EE: Event}

# 原始 schema 里类别名可能出现的键
_LABEL_KEYS = ("class", "name", "type", "label", "event_type", "relation", "entity_type")
_ARG_KEYS = ("arguments", "roles", "args", "role_list")
_DESC_KEYS = ("description", "descriptor", "desc")
_CLASS_LIST_KEYS = ("classes", "schema", "entities", "relations", "events", "labels")


class SchemaClass(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    class_id: str = Field(alias="class")
    arguments: Tuple[str, ...] = ()
    descriptor: str = Field(default="", alias="description")

    @field_validator("class_id")
    @classmethod
    def _non_empty(cls, v):
        if not v.strip():
            raise ValueError("class 不能为空")
        return v

    @model_validator(mode="after")
    def _unique_arguments(self):
        if any(not a.strip() for a in self.arguments):
            raise ValueError(f"{self.class_id}: 论元名不能为空")
        if len(set(self.arguments)) != len(self.arguments):
            raise ValueError(f"{self.class_id}: 论元名重复")
        return self


class UnifiedSchema(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    task: TaskKind
    classes: Tuple[SchemaClass, ...]
    source_name: str = Field(default="", alias="source")

    @model_validator(mode="after")
    def _check_invariants(self):
        if not self.classes:
            raise ValueError("schema 至少需要一个类别")
        seen = set()
        for c in self.classes:
            key = c.class_id.casefold()
            if key in seen:
                raise ValueError(f"类别重复: {c.class_id}")
            seen.add(key)
            if self.task == TaskKind.RE and c.arguments != RE_ARGUMENTS:
                raise ValueError(f"RE 类别 {c.class_id} 的论元必须是 [subject, object]")
            if self.task == TaskKind.NER and c.arguments:
                raise ValueError(f"NER 类别 {c.class_id} 不应有论元")
            if self.task == TaskKind.EE and not c.arguments:
                raise ValueError(f"EE 类别 {c.class_id} 没有论元角色")
        return self

    def class_ids(self):
        return [c.class_id for c in self.classes]

    def get_class(self, class_id):
        for c in self.classes:
            if c.class_id == class_id:
                return c
        return None

    def match_label(self, label):
        """大小写不敏感地找到 schema 里的写法，找不到返回 None"""
        key = str(label).strip().casefold()
        for c in self.classes:
            if c.class_id.casefold() == key:
                return c.class_id
        return None

    def match_role(self, class_id, role):
        c = self.get_class(class_id)
        if c is None:
            return None
        key = str(role).strip().casefold()
        for a in c.arguments:
            if a.casefold() == key:
                return a
        return None

    def labels(self):
        """schema 中出现的全部类别名与角色名"""
        names = []
        for c in self.classes:
            names.append(c.class_id)
            names.extend(c.arguments)
        return names

    def to_json(self):
        return self.model_dump(by_alias=True, mode="json")


def make_class(class_id, arguments=(), descriptor=""):
    return SchemaClass.model_validate(
        {"class": class_id, "arguments": list(arguments), "description": descriptor or ""})


def _first(entry, keys, default=None):
    for k in keys:
        if k in entry and entry[k] is not None:
            return entry[k]
    return default


def _raw_entries(raw):
    """把各种写法的原始 schema 展开成 [(label, arguments, description)]"""
    if isinstance(raw, dict):
        body = _first(raw, _CLASS_LIST_KEYS)
        if body is None:
            body = {k: v for k, v in raw.items() if k not in ("task", "source", "source_name")}
    else:
        body = raw
    entries = []
    if isinstance(body, dict):
        # {label: [roles]} / {label: "description"} / {label: {...}}
        for label, value in body.items():
            if isinstance(value, list):
                entries.append((label, value, ""))
            elif isinstance(value, str):
                entries.append((label, [], value))
            elif isinstance(value, dict):
                entries.append((label, _first(value, _ARG_KEYS, []), _first(value, _DESC_KEYS, "")))
            else:
                entries.append((label, [], ""))
    elif isinstance(body, (list, tuple)):
        for item in body:
            if isinstance(item, str):
                entries.append((item, [], ""))
            elif isinstance(item, dict):
                entries.append((_first(item, _LABEL_KEYS, ""), _first(item, _ARG_KEYS, []),
                                _first(item, _DESC_KEYS, "")))
            else:
                raise SchemaViolation(f"无法识别的类别描述: {item!r}")
    else:
        raise SchemaViolation(f"无法识别的 schema: {raw!r}")
    return entries


def compile_schema(raw, task=None, source_name=None):
    """
    把任务自己的 schema 描述编译成 UnifiedSchema。

    Args:
        raw: UnifiedSchema / 规范 JSON 对象 / {"classes": [...]} / {label: roles} 等
        task: TaskKind，raw 里带 "task" 时可以省略
        source_name: 数据集名

    Raises:
        EmptySchema, DuplicateClass, MissingArguments, SchemaViolation
    """
    if isinstance(raw, UnifiedSchema):
        if task is not None and TaskKind(task) != raw.task:
            raise SchemaViolation(f"schema 的任务是 {raw.task.value}，不是 {TaskKind(task).value}")
        if source_name is not None and source_name != raw.source_name:
            return raw.model_copy(update={"source_name": source_name})
        return raw
    if isinstance(raw, str):
        raw = _loads(raw)
    if task is None:
        task = raw.get("task") if isinstance(raw, dict) else None
    if task is None:
        raise SchemaViolation("未指定任务类型（NER / RE / EE）")
    try:
        task = TaskKind(str(task.value if isinstance(task, TaskKind) else task).upper())
    except ValueError:
        raise SchemaViolation(f"未知的任务类型: {task}")
    if source_name is None:
        source_name = raw.get("source", raw.get("source_name", "")) if isinstance(raw, dict) else ""

    entries = _raw_entries(raw)
    if not entries:
        raise EmptySchema()
    classes = []
    seen = set()
    for label, arguments, description in entries:
        if not isinstance(label, str) or not label.strip():
            raise SchemaViolation(f"类别名为空: {label!r}")
        if label.casefold() in seen:
            raise DuplicateClass(label)
        seen.add(label.casefold())
        if task == TaskKind.RE:
            arguments = RE_ARGUMENTS
        elif task == TaskKind.NER:
            arguments = ()
        elif not arguments:
            raise MissingArguments(label)
        try:
            classes.append(make_class(label, arguments, description))
        except ValidationError as e:
            raise SchemaViolation(str(e))
    try:
        return UnifiedSchema.model_validate(
            {"task": task.value, "classes": [c.model_dump(by_alias=True) for c in classes],
             "source": source_name or ""})
    except ValidationError as e:
        raise SchemaViolation(str(e))


def serialize_schema(s):
    return canonical_dumps(s.to_json())


def _loads(text):
    try:
        return json.loads(text)
    except (json.JSONDecodeError, TypeError) as e:
        raise MalformedJson(f"schema JSON 无法解析: {e}")


def schema_from_json(obj):
    if not isinstance(obj, dict):
        raise SchemaViolation(f"schema 必须是 JSON 对象: {type(obj).__name__}")
    try:
        return UnifiedSchema.model_validate(obj)
    except ValidationError as e:
        raise SchemaViolation(str(e))


def parse_schema(text):
    return schema_from_json(_loads(text))


def load_schemas(path):
    """一个文件一个 schema，或者一个数据集一个 JSON 数组"""
    with open(path, "r", encoding="utf-8") as f:
        obj = _loads(f.read())
    if isinstance(obj, list):
        return [schema_from_json(o) for o in obj]
    return [schema_from_json(obj)]


def schema_stats(s):
    """类别数；EE 记成 events(arguments)，比如 5(26)"""
    n_classes = len(s.classes)
    n_arguments = sum(len(c.arguments) for c in s.classes)
    notation = f"{n_classes}({n_arguments})" if s.task == TaskKind.EE else str(n_classes)
    return {"source": s.source_name, "task": s.task.value, "classes": n_classes,
            "arguments": n_arguments, "notation": notation}


UNKNOWN_CLASS = "UnknownClass"
UNKNOWN_ARGUMENT = "UnknownArgument"
WRONG_ARITY = "WrongArity"


@dataclass(frozen=True)
class ValidationIssue:
    index: int
    reason: str
    detail: str = ""


@dataclass
class ValidationReport:
    issues: list = field(default_factory=list)
    checked: int = 0

    @property
    def valid(self):
        return not self.issues

    def invalid_indices(self):
        return sorted({i.index for i in self.issues})

    def reasons(self):
        return [i.reason for i in self.issues]

    def to_json(self):
        return {"valid": self.valid, "checked": self.checked,
                "issues": [{"index": i.index, "reason": i.reason, "detail": i.detail} for i in self.issues]}


def validate_output(records, s):
    """逐条检查记录是否落在 schema 内；失败写进报告而不是抛异常"""
    report = ValidationReport(checked=len(records))
    expected = EXPECTED_RECORD[s.task]
    for i, record in enumerate(records):
        if not isinstance(record, expected):
            report.issues.append(ValidationIssue(
                i, WRONG_ARITY, f"{s.task.value} 任务不接受 {type(record).__name__}"))
            continue
        cls = s.get_class(record.label())
        if cls is None:
            report.issues.append(ValidationIssue(i, UNKNOWN_CLASS, record.label()))
            continue
        if isinstance(record, Relation) and cls.arguments != RE_ARGUMENTS:
            report.issues.append(ValidationIssue(i, WRONG_ARITY, cls.class_id))
        for role in record.roles():
            if role not in cls.arguments:
                report.issues.append(ValidationIssue(i, UNKNOWN_ARGUMENT, f"{cls.class_id}.{role}"))
    return report
