"""
模型输出 -> 记录：拆 <think>，一次修复后严格解析 JSON，规范化，比较。

匹配规则：
- span 只比字符串（不看偏移），空白规范化后区分大小写
- 类别 / 角色名大小写不敏感，改写成 schema 里的写法
- y = y* 用集合相等（重复记录合并）
"""
import json
import re
from dataclasses import dataclass

from ..Base.utils import canonical_dumps, normalize_ws
from .Exceptions import UnbalancedMarkers, Unparseable
from .ExtractionRecord import Entity, Event, Relation, record_from_json, records_to_json

THINK_OPEN = "<think>"
THINK_CLOSE = "</think>"

_FENCE = re.compile(r"```[a-zA-Z]*\s*(.*?)```", re.DOTALL)
_LIST_KEYS = ("records", "result", "results", "output", "entities", "relations", "events")


def split_reasoning(text):
    """
    Returns:
        (cot, answer)；没有 think 标记时 cot 为空、answer 为全文
    Raises:
        UnbalancedMarkers: 只有开标记 / 只有闭标记 / 顺序颠倒
    """
    text = text or ""
    open_idx = text.find(THINK_OPEN)
    close_idx = text.find(THINK_CLOSE)
    if open_idx == -1 and close_idx == -1:
        return "", text
    if open_idx == -1 or close_idx == -1 or close_idx < open_idx:
        raise UnbalancedMarkers()
    return text[open_idx + len(THINK_OPEN):close_idx], text[close_idx + len(THINK_CLOSE):]


@dataclass(frozen=True)
class ReasoningOutput:
    cot: str
    answer: str
    records: tuple = ()


def render_answer(records):
    return canonical_dumps(records_to_json(records))


def render_completion(cot, records):
    return f"{THINK_OPEN}{cot}{THINK_CLOSE}{render_answer(records)}"


_DECODER = json.JSONDecoder()


def _decode_first_value(answer):
    """唯一一次修复：去掉代码块围栏，从第一个 [ 或 { 起只取一个完整的 JSON 值，前后的文字丢掉"""
    text = answer or ""
    fence = _FENCE.search(text)
    if fence:
        text = fence.group(1)
    starts = [i for i in (text.find("["), text.find("{")) if i != -1]
    if not starts:
        raise Unparseable()
    try:
        value, _ = _DECODER.raw_decode(text, min(starts))
    except json.JSONDecodeError as e:
        raise Unparseable(f"JSON 解析失败: {e}")
    return value


def _items(value):
    if isinstance(value, list):
        return value
    if isinstance(value, dict):
        if any(k in value for k in ("mention", "relation", "event")):
            return [value]
        for key in _LIST_KEYS:
            if isinstance(value.get(key), list):
                return value[key]
        lists = [v for v in value.values() if isinstance(v, list)]
        if len(lists) == 1:
            return lists[0]
    raise Unparseable(f"JSON 不是记录列表: {type(value).__name__}")


def parse_model_output(answer, s, diagnostics=None):
    """
    解析回答里的 JSON 记录，按 schema 校验，丢掉不合法的记录。

    Args:
        diagnostics: 可选 dict，会写入 parsed / dropped / drop_reasons
    Returns:
        规范化后的记录 tuple
    Raises:
        Unparseable
    """
    # UnifiedSchema 导入了 Records，这里不能放顶层
    from ..Schema.UnifiedSchema import validate_output

    value = _decode_first_value(answer)
    items = _items(value)
    reasons = []
    records = []
    for item in items:
        try:
            records.append(record_from_json(item))
        except ValueError as e:
            reasons.append(f"Malformed: {e}")
    decoded = len(records)
    records = list(canonicalize(records, s))
    report = validate_output(records, s)
    bad = set(report.invalid_indices())
    reasons.extend(i.reason for i in report.issues)
    kept = tuple(r for i, r in enumerate(records) if i not in bad)
    if diagnostics is not None:
        diagnostics["parsed"] = len(items)
        diagnostics["dropped"] = (len(items) - decoded) + len(bad)
        diagnostics["deduplicated"] = decoded - len(records)
        diagnostics["drop_reasons"] = reasons
    return kept


def _label(label, s):
    label = normalize_ws(label)
    if s is not None:
        return s.match_label(label) or label
    return label


def _role(class_id, role, s):
    role = normalize_ws(role)
    if s is not None:
        return s.match_role(class_id, role) or role
    return role


def _canonical_record(record, s):
    if isinstance(record, Entity):
        mention = normalize_ws(record.mention)
        label = _label(record.class_id, s)
        if not mention or not label:
            return None
        return Entity(mention, label)
    if isinstance(record, Relation):
        subject, obj = normalize_ws(record.subject), normalize_ws(record.object)
        label = _label(record.relation, s)
        if not subject or not obj or not label:
            return None
        return Relation(subject, label, obj)
    if isinstance(record, Event):
        label = _label(record.class_id, s)
        trigger = normalize_ws(record.trigger)
        if not label or not trigger:
            return None
        args = set()
        for role, span in record.arguments:
            role, span = _role(label, role, s), normalize_ws(span)
            if role and span:
                args.add((role, span))
        return Event(label, trigger, tuple(sorted(args)))
    raise TypeError(f"不是抽取记录: {record!r}")


def canonicalize(records, s=None):
    """空白规范化、标签改写成 schema 写法、去重、按固定全序排序"""
    out = set()
    for record in records or ():
        c = _canonical_record(record, s)
        if c is not None:
            out.add(c)
    return tuple(sorted(out, key=lambda r: r.sort_key()))


def records_match(pred, gold):
    return set(pred) == set(gold)


def parse_completion(text, s, diagnostics=None):
    """
    完整输出 -> ReasoningOutput

    Raises:
        UnbalancedMarkers, Unparseable
    """
    cot, answer = split_reasoning(text)
    return ReasoningOutput(cot, answer, parse_model_output(answer, s, diagnostics))
