"""
数据集流水线：基础语料整理 -> 负样本下采样 -> 推理 SFT 样本渲染 -> 策略隐藏 -> SFT / RL 分流
"""
import random
from dataclasses import dataclass, field, replace
from typing import Dict, Optional

import numpy as np
import pandas as pd
from ncatbot.utils.logger import get_log
from pydantic import BaseModel, ConfigDict

from ..Base.utils import ceil_count, normalize_ws, sha256_json
from ..Records.ExtractionRecord import records_to_json
from ..Records.OutputParser import THINK_CLOSE, THINK_OPEN, canonicalize, render_answer
from ..Schema.Exceptions import SchemaError
from ..Schema.UnifiedSchema import validate_output
from .Adapters import get_adapter
from .Corpus import SFT, segment_offsets
from .Exceptions import RouteMismatch
from .Prompting import SKIP_REASONING, STRATEGY_PREFIX, build_prompt

log = get_log()

CURATE = "curate"
# 负样本下采样的随机流编号
NEGATIVE_STREAM = 1


class CurationRules(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    adapter: str = "native"
    # 数据集名 -> UnifiedSchema
    schemas: Dict[str, object] = {}
    source: Optional[str] = None
    split: Optional[str] = None


def dedup_key(record):
    gold = canonicalize(record.gold, record.schema_ref)
    return sha256_json({"x": normalize_ws(record.x), "gold": records_to_json(gold)})


def curate_corpus(raw, rules=None, stats=None):
    """
    格式改写 -> 质量过滤（文本非空、gold 符合 schema）-> 精确去重

    Raises:
        UnknownAdapter
    """
    rules = rules or CurationRules()
    adapter = get_adapter(rules.adapter)
    counts = {"read": 0, "malformed": 0, "empty_x": 0, "invalid_gold": 0, "duplicate": 0, "kept": 0}
    seen = set()
    out = []
    for i, row in enumerate(raw):
        counts["read"] += 1
        try:
            record = adapter(row, rules.schemas, i)
        except (ValueError, KeyError, TypeError, SchemaError) as e:
            counts["malformed"] += 1
            log.debug(f"第 {i} 条记录无法解析，丢弃: {e}")
            continue
        if rules.source is not None:
            record = replace(record, source=rules.source)
        if rules.split is not None:
            record = replace(record, split=rules.split)
        if not record.x.strip():
            counts["empty_x"] += 1
            continue
        gold = canonicalize(record.gold, record.schema_ref)
        if not validate_output(gold, record.schema_ref).valid:
            counts["invalid_gold"] += 1
            continue
        key = dedup_key(record)
        if key in seen:
            counts["duplicate"] += 1
            continue
        seen.add(key)
        out.append(replace(record, gold=gold))
    counts["kept"] = len(out)
    log.info(f"语料整理: {counts}")
    if stats is not None:
        for name, n in counts.items():
            stats.count(CURATE, name, n)
    return out


def subsample_negatives(records, keep_ratio, seed=0):
    """
    非空 gold 全部保留；空 gold 每条以 keep_ratio 的概率保留。

    打乱顺序后做系统抽样：每条的保留概率恰为 keep_ratio，
    保留条数是 keep_ratio·n 的下取整或上取整
    """
    if not 0 <= keep_ratio <= 1:
        raise ValueError(f"keep_ratio 必须在 [0, 1] 内: {keep_ratio}")
    negatives = [i for i, record in enumerate(records) if not record.gold]
    rng = np.random.default_rng(np.random.SeedSequence([seed, NEGATIVE_STREAM]))
    ranks = rng.permutation(len(negatives))
    offset = rng.random()
    hits = np.floor((ranks + 1) * keep_ratio + offset) > np.floor(ranks * keep_ratio + offset)
    dropped = {i for i, hit in zip(negatives, hits) if not hit}
    out = [record for i, record in enumerate(records) if i not in dropped]
    log.info(f"负样本下采样: {len(records)} -> {len(out)} (keep_ratio={keep_ratio})")
    return out


@dataclass
class SftSample:
    id: str
    instance_id: str
    # 不带 strategy 前缀的输入
    input: str
    prompt: str
    target: str
    loss_mask: dict = field(default_factory=dict)
    hidden: bool = False
    level: int = 0
    task: str = ""

    def cot_text(self):
        start, end = self.loss_mask["cot"]
        return self.target[start:end]

    def struct_text(self):
        start, end = self.loss_mask["struct"]
        return self.target[start:end]

    def to_json(self):
        return {"id": self.id, "instance_id": self.instance_id, "input": self.input, "prompt": self.prompt,
                "target": self.target, "loss_mask": self.loss_mask, "hidden": self.hidden,
                "level": self.level, "task": self.task}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["id"], obj["instance_id"], obj["input"], obj["prompt"], obj["target"],
                   obj["loss_mask"], bool(obj.get("hidden")), int(obj.get("level", 0)), obj.get("task", ""))


def make_target(cot, answer, cot_enabled=True):
    target = f"{THINK_OPEN}{cot}{THINK_CLOSE}{answer}"
    cot_span, struct_span = segment_offsets(cot, answer)
    return target, {"cot": list(cot_span), "struct": list(struct_span), "cot_enabled": cot_enabled}


def render_sft(instances):
    """每条保留的轨迹一个样本；prompt 以 strategy 为前缀"""
    samples = []
    for inst in instances:
        if inst.route != SFT:
            raise RouteMismatch(f"实例 {inst.id} 的 route 是 {inst.route}")
        s = inst.record.schema_ref
        source = build_prompt(inst.record.x, s)
        for k, trace in enumerate(inst.traces):
            target, mask = make_target(trace.cot, render_answer(trace.prediction))
            samples.append(SftSample(f"{inst.id}#{k}", inst.id, source,
                                     build_prompt(inst.record.x, s, strategy=trace.strategy.text),
                                     target, mask, False, inst.level, inst.task.value))
    log.info(f"推理 SFT 样本: {len(samples)} 条（{len(instances)} 个实例）")
    return samples


def render_base_sft(records):
    """第一阶段指令数据：schema + 文本 -> 答案 JSON，不带推理和 strategy"""
    samples = []
    for record in records:
        answer = render_answer(canonicalize(record.gold, record.schema_ref))
        prompt = build_prompt(record.x, record.schema_ref, reasoning=False)
        mask = {"cot": [0, 0], "struct": [0, len(answer)], "cot_enabled": False}
        samples.append(SftSample(record.id, record.id, prompt, prompt, answer, mask, False, 0,
                                 record.task.value))
    return samples


def hide_strategy(sample, suffix="hidden"):
    """克隆成一个要求跳过推理的样本：think 内容为空，CoT loss 关闭"""
    target, mask = make_target("", sample.struct_text(), cot_enabled=False)
    prompt = STRATEGY_PREFIX.format(strategy=SKIP_REASONING) + sample.input
    return replace(sample, id=f"{sample.id}#{suffix}", prompt=prompt, target=target, loss_mask=mask, hidden=True)


def inject_strategy_hiding(samples, fraction, seed=0):
    """在原样本之后追加 ⌈fraction·n⌉ 个隐藏推理的克隆"""
    if not 0 <= fraction <= 1:
        raise ValueError(f"fraction 必须在 [0, 1] 内: {fraction}")
    samples = list(samples)
    k = min(ceil_count(fraction, len(samples)), len(samples))
    chosen = sorted(random.Random(seed).sample(range(len(samples)), k))
    clones = [hide_strategy(samples[i]) for i in chosen]
    log.info(f"策略隐藏: 追加 {len(clones)} 条（fraction={fraction}）")
    return samples + clones


def route_instances(instances, o):
    """level >= O 进 SFT，其余进 RL"""
    sft, rl = [], []
    for inst in instances:
        (sft if inst.level >= o else rl).append(inst)
    log.info(f"分流: SFT {len(sft)} / RL {len(rl)} (O={o})")
    return sft, rl


def level_histogram(instances, p=None):
    """
    每个任务的 level 分布与累计占比

    Returns:
        pd.DataFrame: columns = task, level, count, proportion, cumulative
    """
    rows = [{"task": inst.task.value, "level": inst.level} for inst in instances]
    columns = ["task", "level", "count", "proportion", "cumulative"]
    if not rows:
        return pd.DataFrame(columns=columns)
    df = pd.DataFrame(rows)
    max_level = p if p is not None else int(df["level"].max())
    frames = []
    for task, group in df.groupby("task", sort=True):
        counts = group["level"].value_counts().reindex(range(max_level + 1), fill_value=0)
        frame = pd.DataFrame({"task": task, "level": counts.index, "count": counts.values})
        frame["proportion"] = frame["count"] / frame["count"].sum()
        frame["cumulative"] = frame["proportion"].cumsum()
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)[columns]
