"""
GRPO 的非训练部分：采样一组输出，逐个打奖励，组内标准化成优势，导出给外部训练器。

    A_i = (R_i - mean(R)) / (std(R) + ε)，std 是总体标准差
"""
import asyncio
import os
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd
from ncatbot.utils.logger import get_log

from ..Base.utils import write_json, write_jsonl
from ..Dataset.Prompting import build_prompt
from ..Reward.RewardEngine import score_completion
from .Exceptions import EmptyPool, PolicyFailure

log = get_log()

EPSILON = 1e-8
ROLLOUT_FORMAT = "grpo-rollouts"


def _record(ex):
    # ReasoningInstance 和 CorpusRecord 都能进池子
    return getattr(ex, "record", ex)


def group_seed(seed, step, slot):
    return int(np.random.SeedSequence([seed, step, slot]).generate_state(1)[0])


@dataclass
class GroupSample:
    instance: object
    prompt: str
    completions: list
    rewards: list = field(default_factory=list)
    advantages: list = field(default_factory=list)
    strategy: Optional[str] = None
    diagnostics: list = field(default_factory=list)
    seed: int = 0

    def to_row(self, step, config_block):
        return {"step": step, "instance_id": self.instance.id, "prompt": self.prompt,
                "completions": self.completions, "rewards": self.rewards, "advantages": self.advantages,
                "config": config_block}


def group_advantages(rewards, eps=EPSILON):
    """奖励全相同时优势全为 0"""
    r = np.asarray(rewards, dtype=float)
    if r.size == 0:
        return []
    if np.all(r == r[0]):
        return [0.0] * int(r.size)
    return ((r - r.mean()) / (r.std() + eps)).tolist()


async def sample_group(ex, policy, g, max_len, prompt=None, seed=0, strategy=None):
    """
    Raises:
        ValueError: g < 2
        PolicyFailure: 返回的输出个数不是 g
    """
    if g < 2:
        raise ValueError(f"组大小至少为 2: {g}")
    record = _record(ex)
    if prompt is None:
        prompt = build_prompt(record.x, record.schema_ref, strategy=strategy)
    completions = await policy.generate(record, prompt, g, max_len, seed)
    if completions is None or len(completions) != g:
        got = 0 if completions is None else len(completions)
        raise PolicyFailure(f"{record.id}: 需要 {g} 个输出，实际 {got} 个")
    # max_len 按字符截断
    completions = [(c or "")[:max_len] for c in completions]
    return GroupSample(record, prompt, completions, strategy=strategy, seed=seed)


def score_group(group, reward_cfg, memo=None):
    """就地写入 rewards / advantages；memo 以 (实例 id, strategy, 输出) 为键"""
    record = group.instance
    rewards = []
    diagnostics = []
    for completion in group.completions:
        key = (record.id, group.strategy, completion)
        breakdown = memo.get(key) if memo is not None else None
        if breakdown is None:
            breakdown = score_completion(completion, record.x, record.schema_ref, record.gold, reward_cfg,
                                         strategy=group.strategy)
            if memo is not None:
                memo[key] = breakdown
        rewards.append(breakdown.r_total)
        diagnostics.append(breakdown.diagnostics)
    group.rewards = rewards
    group.diagnostics = diagnostics
    group.advantages = group_advantages(rewards)
    return group


class DynamicsLog:
    """每步的平均奖励与平均输出长度（字符）"""

    COLUMNS = ["step", "mean_reward", "mean_length", "groups"]

    def __init__(self):
        self.rows = []

    def __len__(self):
        return len(self.rows)

    def append(self, step, mean_reward, mean_length, groups=0):
        if self.rows and step <= self.rows[-1]["step"]:
            raise ValueError(f"step 必须严格递增: {self.rows[-1]['step']} -> {step}")
        self.rows.append({"step": int(step), "mean_reward": float(mean_reward),
                          "mean_length": float(mean_length), "groups": int(groups)})

    def rewards(self):
        return [r["mean_reward"] for r in self.rows]

    def to_frame(self):
        return pd.DataFrame(self.rows, columns=self.COLUMNS)

    def to_json(self):
        return list(self.rows)

    def save(self, csv_path=None, json_path=None):
        if csv_path:
            os.makedirs(os.path.dirname(os.path.abspath(csv_path)), exist_ok=True)
            self.to_frame().to_csv(csv_path, index=False)
        if json_path:
            write_json(json_path, self.to_json())


def _prompt_and_strategy(record, mode, repository, rng):
    if repository is None:
        return build_prompt(record.x, record.schema_ref, reasoning=mode != "none"), None
    strategy = repository.select(record.x, record.schema_ref, mode, rng)
    text = strategy.text if strategy is not None else None
    return build_prompt(record.x, record.schema_ref, strategy=text, reasoning=mode != "none"), text


async def alignment_step(step, batch, policy, cfg, reward_cfg, memo, repository=None, rng=None):
    async def one(slot, ex):
        record = _record(ex)
        prompt, strategy = _prompt_and_strategy(record, cfg.strategy_mode, repository, rng)
        group = await sample_group(record, policy, cfg.g, cfg.max_len, prompt=prompt,
                                   seed=group_seed(cfg.seed, step, slot), strategy=strategy)
        return score_group(group, reward_cfg, memo)

    return list(await asyncio.gather(*(one(slot, ex) for slot, ex in enumerate(batch))))


async def run_alignment_loop(pool, policy, cfg, reward_cfg, steps=None, out_path=None, repository=None,
                             config=None):
    """
    Args:
        pool: RL 路由的实例（或语料记录）
        cfg: GrpoConfig
        steps: 默认 cfg.steps
        out_path: 每步每组一行的 JSONL，交给外部训练器
    Returns:
        DynamicsLog
    Raises:
        EmptyPool
    """
    pool = list(pool)
    if not pool:
        raise EmptyPool()
    steps = cfg.steps if steps is None else steps
    rng = random.Random(cfg.seed)
    memo = {}
    dynamics = DynamicsLog()
    rows = []
    block = cfg.export_block()
    log.info(f"开始对齐: 实例 {len(pool)} 个, {steps} 步, G={cfg.g}, batch={cfg.batch_size}")
    for step in range(steps):
        # 有放回抽样，池子比 batch 小也能跑
        batch = [pool[rng.randrange(len(pool))] for _ in range(cfg.batch_size)]
        groups = await alignment_step(step, batch, policy, cfg, reward_cfg, memo, repository, rng)
        policy.update(groups)
        rewards = [r for g in groups for r in g.rewards]
        lengths = [len(c) for g in groups for c in g.completions]
        dynamics.append(step, float(np.mean(rewards)), float(np.mean(lengths)), len(groups))
        if out_path:
            rows.extend(g.to_row(step, block) for g in groups)
        if step % 20 == 0 or step == steps - 1:
            log.info(f"step {step}: 平均奖励 {dynamics.rows[-1]['mean_reward']:.4f}, "
                     f"平均长度 {dynamics.rows[-1]['mean_length']:.1f}")
    if out_path:
        write_jsonl(out_path, rows, fmt=ROLLOUT_FORMAT, config=config, grpo=block)
    return dynamics


async def majority_predictions(pool, policy, cfg, step=None):
    """每个实例再采样一组，取出现最多的输出（并列取先出现的）作为预测"""
    step = cfg.steps if step is None else step
    seen = {}
    for ex in pool:
        record = _record(ex)
        seen.setdefault(record.id, record)

    async def one(slot, record):
        group = await sample_group(record, policy, cfg.g, cfg.max_len, seed=group_seed(cfg.seed, step, slot))
        completion, _ = Counter(group.completions).most_common(1)[0]
        return {"id": record.id, "completion": completion}

    return list(await asyncio.gather(*(one(slot, r) for slot, r in enumerate(seen.values()))))
