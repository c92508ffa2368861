"""
多视角推理数据构建：

    发散   3 个分析维度 × N 次独立调用 -> 3N 个 strategy
    收敛   关键词范式聚类 -> 每簇最独特 / 最通用两个代表 -> 均匀抽 P 个
    生成   每个 strategy 引导一次 (CoT, y)
    拒绝   只留 y == y* 的轨迹，level = 留下的条数，level >= O 进 SFT，否则进 RL
"""
import asyncio
import random

from ncatbot.utils.logger import get_log

from ..Dataset.Corpus import RL, SFT, ReasoningInstance
from ..Gateway.Exceptions import BadResponse, GatewayError
from ..Gateway.GeneratorGateway import RATIONALE, STRATEGY
from ..Records.Exceptions import UnbalancedMarkers, Unparseable
from ..Records.OutputParser import THINK_CLOSE, THINK_OPEN, canonicalize, parse_model_output, records_match, split_reasoning
from ..Schema.UnifiedSchema import serialize_schema
from .Convergence import cluster_by_paradigm, representative_pool, sample_core
from .Prompts import render_template
from .Strategy import DIMENSIONS, ReasoningTrace, Strategy

log = get_log()

BUILD_REASONING = "build-reasoning"

# 空白结果重试时 seed 的偏移，保证每次重试都是新请求
RETRY_SEED_STRIDE = 1000


def strategy_text(completion):
    """strategy 取 </think> 之后的部分；标记不成对时去掉标记用全文"""
    try:
        _, answer = split_reasoning(completion)
    except UnbalancedMarkers:
        answer = completion.replace(THINK_OPEN, " ").replace(THINK_CLOSE, " ")
    return answer.strip()


class StrategyForge:

    def __init__(self, gateway, paradigms, n_per_dim=5, p=5, o=3, seed=0, blank_retries=2, prompt_dir=None,
                 strategy_temperature=1.0, rationale_temperature=0.0, max_tokens=2048, stats=None):
        self.gateway = gateway
        self.paradigms = list(paradigms)
        self.n_per_dim = n_per_dim
        self.p = p
        self.o = o
        self.seed = seed
        self.blank_retries = blank_retries
        self.prompt_dir = prompt_dir
        self.strategy_temperature = strategy_temperature
        self.rationale_temperature = rationale_temperature
        self.max_tokens = max_tokens
        self.stats = stats

    @classmethod
    def from_config(cls, gateway, paradigms, cfg, stats=None):
        """cfg 是 PipelineConfig"""
        return cls(gateway, paradigms, n_per_dim=cfg.forge.n_per_dim, p=cfg.forge.p, o=cfg.forge.o,
                   seed=cfg.forge.seed, blank_retries=cfg.forge.blank_retries, prompt_dir=cfg.forge.prompt_dir,
                   strategy_temperature=cfg.gateway.strategy_temperature,
                   rationale_temperature=cfg.gateway.judge_temperature,
                   max_tokens=cfg.gateway.max_tokens, stats=stats)

    def _values(self, x, s, **extra):
        values = {"x": x, "schema": serialize_schema(s), "task": s.task.value, "strategy": "", "dimension": ""}
        values.update(extra)
        return values

    async def _one_strategy(self, x, s, dimension, i):
        prompt = render_template(dimension.value, self.prompt_dir, **self._values(x, s, dimension=dimension.value))
        for attempt in range(self.blank_retries + 1):
            req = self.gateway.request(prompt, purpose=STRATEGY, temperature=self.strategy_temperature,
                                       max_tokens=self.max_tokens, seed=i + RETRY_SEED_STRIDE * attempt)
            try:
                text = strategy_text((await self.gateway.complete(req)).completion)
            except BadResponse:
                text = ""
            if text:
                return Strategy(text, dimension)
            log.debug(f"{dimension.value} 第 {i} 个 strategy 为空，重试 ({attempt + 1})")
        return None

    async def diverge(self, x, s, n_per_dim=None):
        """
        每个维度 n_per_dim 次独立调用，共 3N 个；空白结果重试后仍为空则跳过
        Raises:
            GatewayFailure: 重试耗尽
        """
        n = n_per_dim or self.n_per_dim
        if n < 1:
            raise ValueError("n_per_dim 至少为 1")
        jobs = [self._one_strategy(x, s, dim, i) for dim in DIMENSIONS for i in range(n)]
        strategies = [st for st in await asyncio.gather(*jobs) if st is not None]
        if len(strategies) < len(jobs):
            log.warning(f"strategy 数量不足: {len(strategies)}/{len(jobs)}")
        return strategies

    async def generate_trace(self, x, s, strat, gold=()):
        prompt = render_template("rationale", self.prompt_dir, **self._values(x, s, strategy=strat.text))
        req = self.gateway.request(prompt, purpose=RATIONALE, temperature=self.rationale_temperature,
                                   max_tokens=self.max_tokens)
        completion = (await self.gateway.complete(req)).completion
        try:
            cot, answer = split_reasoning(completion)
        except UnbalancedMarkers:
            return ReasoningTrace(strat, "", (), False, "UnbalancedMarkers")
        try:
            prediction = parse_model_output(answer, s)
        except Unparseable:
            return ReasoningTrace(strat, cot, (), False, "Unparseable")
        correct = records_match(prediction, canonicalize(gold, s))
        return ReasoningTrace(strat, cot, prediction, correct)

    def instance_seed(self, record_id):
        return random.Random(f"{self.seed}:{record_id}").getrandbits(32)

    async def build_instance(self, ex):
        """ex 是 CorpusRecord"""
        s = ex.schema_ref
        strategies = await self.diverge(ex.x, s)
        if not strategies:
            return ReasoningInstance(ex, [], 0, SFT if 0 >= self.o else RL, 0, 0)
        clusters = cluster_by_paradigm(strategies, self.paradigms)
        core = sample_core(representative_pool(clusters), self.p, seed=self.instance_seed(ex.id))
        traces = await asyncio.gather(*(self.generate_trace(ex.x, s, st, ex.gold) for st in core))
        kept = [t for t in traces if t.correct]
        level = len(kept)
        route = SFT if level >= self.o else RL
        return ReasoningInstance(ex, kept, level, route, len(strategies), len(core))

    async def _build_or_mark(self, ex):
        try:
            instance = await self.build_instance(ex)
        except GatewayError as e:
            self.gateway.flush()
            log.error(f"实例 {ex.id} 构建失败，已标记为未完成（缓存里的结果下次复用）: {e}")
            if self.stats is not None:
                self.stats.mark_incomplete(ex.id)
                self.stats.count(BUILD_REASONING, "incomplete")
            return None
        if self.stats is not None:
            self.stats.mark_complete(ex.id)
            self.stats.count(BUILD_REASONING, "instances")
            self.stats.count(BUILD_REASONING, "strategies", instance.n_strategies)
            self.stats.count(BUILD_REASONING, f"route_{instance.route}")
            self.stats.record_level(instance.task.value, instance.level)
        self.gateway.flush()
        return instance

    async def build_corpus(self, records):
        """实例互相独立，并发构建；输出顺序与输入一致，失败的实例不输出"""
        results = await asyncio.gather(*(self._build_or_mark(ex) for ex in records))
        instances = [r for r in results if r is not None]
        log.info(f"推理数据构建完成: {len(instances)}/{len(results)} 个实例")
        return instances
