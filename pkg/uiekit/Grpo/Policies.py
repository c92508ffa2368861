"""
策略模型适配器。训练器不在这里，GRPO 只需要“给 prompt，返回 G 个输出”。
"""
import asyncio
import math
from abc import ABC, abstractmethod

import numpy as np
from ncatbot.utils.logger import get_log

from ..Gateway.Exceptions import GatewayError
from ..Gateway.GeneratorGateway import RATIONALE
from ..Records.ExtractionRecord import Entity, Event, Relation
from ..Records.OutputParser import canonicalize, render_completion
from ..Schema.UnifiedSchema import TaskKind
from .Exceptions import PolicyFailure

log = get_log()

PROSE_COMPLETION = "I read the text carefully but I am not sure which records to extract."


class PolicyAdapter(ABC):

    @abstractmethod
    async def generate(self, ex, prompt, g, max_len, seed):
        """返回恰好 g 个输出"""

    def update(self, groups):
        """一步结束后收到这一步所有打过分的组；默认什么也不做"""


class GatewayPolicy(PolicyAdapter):
    """把策略模型当作一个生成服务调用，每个槽位一个 seed"""

    def __init__(self, gateway, temperature=1.0):
        self.gateway = gateway
        self.temperature = temperature

    async def generate(self, ex, prompt, g, max_len, seed):
        reqs = [self.gateway.request(prompt, purpose=RATIONALE, temperature=self.temperature,
                                     max_tokens=max_len, seed=seed + i) for i in range(g)]
        try:
            responses = await asyncio.gather(*(self.gateway.complete(r) for r in reqs))
        except GatewayError as e:
            raise PolicyFailure(f"{ex.id}: {e}")
        return [r.completion for r in responses]


class ScriptedPolicy(PolicyAdapter):
    """按实例 id 循环返回预先写好的输出"""

    def __init__(self, scripted, default=None):
        self.scripted = {k: list(v) for k, v in scripted.items()}
        self.default = list(default or [])

    async def generate(self, ex, prompt, g, max_len, seed):
        outputs = self.scripted.get(ex.id) or self.default
        if not outputs:
            raise PolicyFailure(f"{ex.id} 没有预设输出")
        return [outputs[i % len(outputs)] for i in range(g)]


def _spurious(record, s, tail=False):
    tokens = record.x.split() or [record.x or "?"]
    span = tokens[-1] if tail else tokens[0]
    other = tokens[0] if tail else tokens[-1]
    cls = s.classes[-1] if tail else s.classes[0]
    if s.task == TaskKind.NER:
        return Entity(span, cls.class_id)
    if s.task == TaskKind.RE:
        return Relation(span, cls.class_id, other)
    return Event(cls.class_id, span, ((cls.arguments[0], other),))


def _relabel(r, s):
    others = [c for c in s.classes if c.class_id != r.label()]
    if not others:
        return None
    target = others[0]
    if isinstance(r, Entity):
        return Entity(r.mention, target.class_id)
    if isinstance(r, Relation):
        return Relation(r.subject, target.class_id, r.object)
    return Event(target.class_id, r.trigger, ((target.arguments[0], r.trigger),))


def bandit_completions(record):
    """
    一个正确输出 + 三个错误输出：
    少一条记录 / 改标签（或多一条记录）/ 没有 JSON 的散文
    """
    s = record.schema_ref
    gold = canonicalize(record.gold, s)
    cot = "Check each span of the text against the schema classes."
    if gold:
        dropped = gold[:-1]
        relabelled = _relabel(gold[0], s)
        wrong = gold[1:] + (relabelled,) if relabelled is not None else gold + (_spurious(record, s, True),)
    else:
        dropped = (_spurious(record, s),)
        wrong = (_spurious(record, s, True),)
    return [
        render_completion(cot, gold),
        render_completion(cot, canonicalize(dropped, s)),
        render_completion(cot, canonicalize(wrong, s)),
        f"<think>{cot}</think>{PROSE_COMPLETION}",
    ]


class BanditPolicy(PolicyAdapter):
    """
    每个实例一组固定候选输出上的类别分布。
    update 时每出现一次，概率质量乘以 exp(η·A)，再归一化。
    """

    def __init__(self, eta=0.1, completions_fn=bandit_completions):
        self.eta = eta
        self.completions_fn = completions_fn
        self.arms = {}
        # (实例 id, seed) -> 抽中的候选下标；输出会被截断，回填时不能按文本找
        self.picks = {}

    def _arm(self, ex):
        if ex.id not in self.arms:
            completions = self.completions_fn(ex)
            self.arms[ex.id] = {"completions": completions,
                                "probs": np.full(len(completions), 1.0 / len(completions))}
        return self.arms[ex.id]

    def probabilities(self, ex):
        return self._arm(ex)["probs"].copy()

    async def generate(self, ex, prompt, g, max_len, seed):
        arm = self._arm(ex)
        rng = np.random.default_rng(seed)
        picks = rng.choice(len(arm["completions"]), size=g, p=arm["probs"])
        self.picks[(ex.id, seed)] = [int(i) for i in picks]
        return [arm["completions"][i] for i in picks]

    def _arm_ids(self, group, arm):
        picks = self.picks.get((group.instance.id, group.seed))
        if picks is not None and len(picks) == len(group.completions):
            return picks
        index = {c: i for i, c in enumerate(arm["completions"])}
        return [index.get(c) for c in group.completions]

    def update(self, groups):
        for group in groups:
            arm = self._arm(group.instance)
            mass = arm["probs"].copy()
            for i, adv in zip(self._arm_ids(group, arm), group.advantages):
                if i is not None:
                    mass[i] *= math.exp(self.eta * adv)
            total = mass.sum()
            if total > 0 and np.isfinite(total):
                arm["probs"] = mass / total
            else:
                log.warning(f"{group.instance.id}: 概率质量溢出，保持原分布")
        self.picks.clear()
