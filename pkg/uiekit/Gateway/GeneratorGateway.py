"""
生成 / 评审模型的统一客户端：内容哈希缓存、指数退避重试、并发上限。

    request_key = sha256(canonical JSON of {prompt, params})
"""
import asyncio
import os
from typing import Literal, Optional

from ncatbot.utils.logger import get_log
from pydantic import BaseModel, ConfigDict, Field

from ..Base.utils import sha256_json
from .Exceptions import BadResponse, Exhausted, TransientGatewayError
from .GenerationCache import GenerationCache

log = get_log()

STRATEGY = "strategy"
RATIONALE = "rationale"
JUDGE = "judge"


class GenerationRequest(BaseModel):
    model_config = ConfigDict(frozen=True)

    prompt: str
    temperature: float = Field(default=1.0, ge=0.0)
    max_tokens: int = Field(default=2048, gt=0)
    purpose: Literal["strategy", "rationale", "judge"] = STRATEGY
    # 让同一个 prompt 的多次调用相互独立
    seed: Optional[int] = None
    model: str = ""

    def params(self):
        return {"model": self.model, "temperature": self.temperature,
                "max_tokens": self.max_tokens, "seed": self.seed}


class GenerationResponse(BaseModel):
    completion: str
    usage: dict = Field(default_factory=dict)
    cached: bool = False
    retries: int = 0


def request_key(req):
    return sha256_json({"prompt": req.prompt, "params": req.params()})


class GeneratorGateway:
    """
    可以被多个协程共享；同时在途的请求数不超过 max_inflight
    """

    def __init__(self, transport, cache=None, max_inflight=8, max_retries=3, backoff_base=0.5, model=""):
        self.transport = transport
        self.cache = cache
        self.max_inflight = max(1, int(max_inflight))
        self.max_retries = max(0, int(max_retries))
        self.backoff_base = backoff_base
        self.model = model
        self._loop = None
        self._semaphore = None

    def semaphore(self):
        # Semaphore 绑定事件循环，每次 asyncio.run 都要换一个
        loop = asyncio.get_running_loop()
        if self._loop is not loop:
            self._loop = loop
            self._semaphore = asyncio.Semaphore(self.max_inflight)
        return self._semaphore

    def request(self, prompt, purpose=STRATEGY, temperature=1.0, max_tokens=2048, seed=None):
        return GenerationRequest(prompt=prompt, purpose=purpose, temperature=temperature,
                                 max_tokens=max_tokens, seed=seed, model=self.model)

    async def complete(self, req):
        """
        Raises:
            Exhausted: 重试次数用完
            BadResponse: 空结果或不合协议
        """
        key = request_key(req)
        if self.cache is not None:
            hit = self.cache.get(key)
            if hit is not None:
                return GenerationResponse(completion=hit["completion"], usage=hit.get("usage", {}),
                                          cached=True, retries=0)
        retries = 0
        async with self.semaphore():
            while True:
                try:
                    result = await self.transport.send(req)
                    break
                except TransientGatewayError as e:
                    if retries >= self.max_retries:
                        log.error(f"生成请求失败，已重试 {retries} 次: {e}")
                        raise Exhausted(f"重试 {retries} 次后仍然失败: {e}", retries=retries)
                    delay = self.backoff_base * (2 ** retries)
                    retries += 1
                    log.warning(f"生成请求暂时失败（{e}），{delay:.2f}s 后第 {retries} 次重试")
                    if delay > 0:
                        await asyncio.sleep(delay)
        completion = result.get("completion") if isinstance(result, dict) else None
        if not isinstance(completion, str) or not completion.strip():
            raise BadResponse(f"空的生成结果 (purpose={req.purpose})")
        value = {"completion": completion, "usage": dict(result.get("usage") or {})}
        if self.cache is not None:
            value = self.cache.put(key, value)
        return GenerationResponse(completion=value["completion"], usage=value["usage"],
                                  cached=False, retries=retries)

    def flush(self):
        """把缓存里还没写盘的结果写出去"""
        if self.cache is None:
            return 0
        return self.cache.flush()


def build_gateway(cfg, mock_path=None, transport=None):
    """
    按配置组装网关。cfg 是 GatewayConfig；给了 mock_path 时用 MockTransport。
    """
    from .Transports import HttpTransport, MockTransport

    if transport is None:
        if mock_path:
            transport = MockTransport.from_file(mock_path)
        elif cfg.url:
            transport = HttpTransport(cfg.url, cfg.key, timeout=cfg.timeout)
        else:
            raise ValueError("没有配置 GATEWAY_URL，也没有指定 --mock")
    cache = None
    if cfg.cache_dir:
        epoch = cfg.epoch()
        cache = GenerationCache(os.path.join(cfg.cache_dir, f"generations-{epoch[:16]}.json"), epoch=epoch)
        log.info(f"生成缓存: {cache.file_path} ({len(cache)} 条)")
    return GeneratorGateway(transport, cache, max_inflight=cfg.max_inflight, max_retries=cfg.max_retries,
                            backoff_base=cfg.backoff_base, model=cfg.model)
