"""
strategy 仓库：从进入 SFT 的推理实例里收集有效 strategy，推理 / RL 时按模式选一个拼进提示词。

    none       不要求推理
    free       要求推理，但不给 strategy
    random     从仓库里随机选
    relevance  按 (x + schema) 与仓库条目来源输入的 TF-IDF 余弦选最相近的
"""
import random

import numpy as np
from ncatbot.utils.logger import get_log

from ..Base.utils import read_jsonl, write_jsonl
from ..Dataset.Corpus import SFT
from ..Dataset.Prompting import build_prompt
from ..Schema.UnifiedSchema import serialize_schema
from .Convergence import similarity_matrix
from .Strategy import Strategy

log = get_log()

NONE = "none"
FREE = "free"
RANDOM = "random"
RELEVANCE = "relevance"
MODES = (NONE, FREE, RANDOM, RELEVANCE)

REPOSITORY_FORMAT = "strategy-repository"


def _query(x, s):
    return f"{x}\n{serialize_schema(s)}"


class StrategyRepository:

    def __init__(self, entries=None):
        # [{"strategy": Strategy, "task": "NER", "source": str}]
        self.entries = list(entries or [])

    def __len__(self):
        return len(self.entries)

    @classmethod
    def from_instances(cls, instances):
        entries = []
        seen = set()
        for inst in instances:
            if inst.route != SFT:
                continue
            for trace in inst.traces:
                key = (inst.task.value, trace.strategy.text)
                if key in seen:
                    continue
                seen.add(key)
                entries.append({"strategy": trace.strategy, "task": inst.task.value,
                                "source": _query(inst.record.x, inst.record.schema_ref)})
        log.info(f"strategy 仓库: {len(entries)} 条")
        return cls(entries)

    def save(self, path, config=None):
        rows = [{"strategy": e["strategy"].to_json(), "task": e["task"], "source": e["source"]}
                for e in self.entries]
        return write_jsonl(path, rows, fmt=REPOSITORY_FORMAT, config=config)

    @classmethod
    def load(cls, path):
        _, rows = read_jsonl(path)
        return cls([{"strategy": Strategy.from_json(r["strategy"]), "task": r["task"], "source": r["source"]}
                    for r in rows])

    def _candidates(self, task):
        same_task = [e for e in self.entries if e["task"] == task.value]
        return same_task or self.entries

    def select(self, x, s, mode, rng=None):
        """Returns: Strategy 或 None（none / free 模式，或仓库为空）"""
        if mode not in MODES:
            raise ValueError(f"未知的 strategy 选择模式: {mode}")
        if mode in (NONE, FREE) or not self.entries:
            return None
        candidates = self._candidates(s.task)
        if mode == RANDOM:
            rng = rng or random.Random(0)
            return candidates[rng.randrange(len(candidates))]["strategy"]
        sims = similarity_matrix([_query(x, s)] + [e["source"] for e in candidates])[0, 1:]
        return candidates[int(np.argmax(sims))]["strategy"]

    def prompt_for(self, x, s, mode=FREE, rng=None):
        strategy = self.select(x, s, mode, rng)
        return build_prompt(x, s, strategy=strategy.text if strategy else None, reasoning=mode != NONE)
