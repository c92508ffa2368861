"""
数据格式适配器：把各家的原始记录改写成 CorpusRecord。

    native  记录已经是统一 JSON 形状 {id, x, schema_ref | schema, gold, source, split}
    iepile  {id, task, instruction: '{"instruction", "schema", "input"}', output: '{label: [...]}'}
    bio     {id, tokens: [...], tags: ["B-PER", "I-PER", "O", ...]}（CoNLL 风格 NER）

适配器解析失败时抛 ValueError，由 curate_corpus 计数丢弃。
"""
import json

from ..Records.ExtractionRecord import Entity, Event, Relation, records_from_json
from ..Schema.UnifiedSchema import TaskKind, UnifiedSchema, compile_schema
from .Corpus import TRAIN, CorpusRecord
from .Exceptions import UnknownAdapter

ADAPTERS = {}


def register_adapter(name):
    def wrapper(func):
        ADAPTERS[name] = func
        return func
    return wrapper


def get_adapter(name):
    if name not in ADAPTERS:
        raise UnknownAdapter(name)
    return ADAPTERS[name]


def _resolve_schema(ref, row, schemas):
    """ref 可以是 schema 对象 / 编译好的 JSON / 在 schemas 里登记的数据集名"""
    if isinstance(ref, UnifiedSchema):
        return ref
    if isinstance(ref, dict):
        return compile_schema(ref, ref.get("task") or row.get("task"))
    name = ref or row.get("source")
    if name and schemas and name in schemas:
        return schemas[name]
    raise ValueError(f"记录 {row.get('id')} 没有可用的 schema: {ref!r}")


def _loads(value):
    return json.loads(value) if isinstance(value, str) else value


@register_adapter("native")
def native_adapter(row, schemas=None, index=0):
    s = _resolve_schema(row.get("schema_ref", row.get("schema")), row, schemas)
    x = row.get("x", row.get("text"))
    if not isinstance(x, str):
        raise ValueError(f"记录 {row.get('id')} 缺少文本")
    gold = tuple(records_from_json(row.get("gold", row.get("records", []))))
    return CorpusRecord(str(row.get("id", index)), x, s, gold, row.get("source", s.source_name),
                        row.get("split", TRAIN))


def _iepile_records(task, output):
    records = []
    for label, items in (output or {}).items():
        for item in items or []:
            if task == TaskKind.NER:
                records.append(Entity(item, label))
            elif task == TaskKind.RE:
                records.append(Relation(item["subject"], label, item["object"]))
            else:
                args = []
                for role, spans in (item.get("arguments") or {}).items():
                    for span in (spans if isinstance(spans, list) else [spans]):
                        if span not in (None, "", "NAN"):
                            args.append((role, span))
                records.append(Event(label, item["trigger"], tuple(args)))
    return tuple(records)


@register_adapter("iepile")
def iepile_adapter(row, schemas=None, index=0):
    task = TaskKind(str(row["task"]).upper())
    instruction = _loads(row["instruction"])
    source = row.get("source", "")
    if schemas and source in schemas:
        s = schemas[source]
    else:
        s = compile_schema(instruction["schema"], task, source)
    gold = _iepile_records(task, _loads(row.get("output")))
    return CorpusRecord(str(row.get("id", index)), instruction["input"], s, gold, source, row.get("split", TRAIN))


def bio_spans(tokens, tags):
    """B-/I- 标签转成 (label, mention)；孤立的 I- 当作新实体开头"""
    if len(tokens) != len(tags):
        raise ValueError("tokens 与 tags 长度不一致")
    spans = []
    label, start = None, None
    for i, tag in enumerate(list(tags) + ["O"]):
        prefix, _, name = tag.partition("-")
        if label is not None and not (prefix == "I" and name == label):
            spans.append((label, " ".join(tokens[start:i])))
            label = None
        if prefix in ("B", "I") and label is None:
            label, start = name, i
    return spans


@register_adapter("bio")
def bio_adapter(row, schemas=None, index=0):
    tokens, tags = row["tokens"], row["tags"]
    source = row.get("source", "")
    if schemas and source in schemas:
        s = schemas[source]
    else:
        labels = sorted({t.partition("-")[2] for t in tags if t != "O"})
        if not labels:
            raise ValueError(f"记录 {row.get('id')} 没有标签，无法推出 schema")
        s = compile_schema({"classes": labels}, TaskKind.NER, source)
    gold = tuple(Entity(mention, label) for label, mention in bio_spans(tokens, tags))
    return CorpusRecord(str(row.get("id", index)), " ".join(tokens), s, gold, source, row.get("split", TRAIN))
