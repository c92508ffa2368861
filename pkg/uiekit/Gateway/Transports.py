import asyncio
import re

import aiohttp
from ncatbot.utils.logger import get_log

from ..Base.utils import read_json, sha256_text
from .Exceptions import BadResponse, TransientGatewayError

log = get_log()

TRANSIENT_STATUS = {408, 429, 500, 502, 503, 504}


class HttpTransport:
    """
    chat-completions 风格的 HTTP 接口

    请求 {model, messages:[{role, content}], temperature, max_tokens}
    响应 {choices:[{message:{content}}], usage}
    """

    def __init__(self, url, key="", timeout=60):
        self.url = url
        self.key = key
        self.timeout = timeout

    def payload(self, req):
        body = {
            "model": req.model,
            "messages": [{"role": "user", "content": req.prompt}],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }
        if req.seed is not None:
            body["seed"] = req.seed
        return body

    async def send(self, req):
        headers = {"Content-Type": "application/json"}
        if self.key:
            headers["Authorization"] = f"Bearer {self.key}"
        try:
            async with aiohttp.ClientSession(headers=headers) as session:
                async with session.post(self.url, json=self.payload(req),
                                        timeout=aiohttp.ClientTimeout(total=self.timeout)) as response:
                    if response.status in TRANSIENT_STATUS:
                        raise TransientGatewayError(f"HTTP {response.status}")
                    if response.status != 200:
                        raise BadResponse(f"HTTP {response.status}: {(await response.text())[:200]}")
                    data = await response.json(content_type=None)
        except (asyncio.TimeoutError, aiohttp.ClientConnectionError) as e:
            raise TransientGatewayError(f"{type(e).__name__}: {e}")
        try:
            content = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise BadResponse(f"响应里没有 choices[0].message.content: {str(data)[:200]}")
        return {"completion": content, "usage": data.get("usage") or {}}


class MockTransport:
    """
    确定性的本地脚本，测试和离线运行用。

    {
        "scripted": {request_key 或 sha256(prompt): completion},
        "rules": [{"purpose": ..., "match": regex, "responses": [...], "pick": "seed" | "hash"}],
        "default": completion
    }
    规则按顺序匹配，第一条命中的生效。
    """

    def __init__(self, scripted=None, rules=None, default=None):
        self.scripted = dict(scripted or {})
        self.rules = []
        for rule in rules or []:
            rule = dict(rule)
            rule["_re"] = re.compile(rule.get("match", ""), re.DOTALL)
            self.rules.append(rule)
        self.default = default
        self.calls = 0

    @classmethod
    def from_file(cls, path):
        script = read_json(path)
        log.info(f"使用 mock 生成脚本: {path}")
        return cls(script.get("scripted"), script.get("rules"), script.get("default"))

    def lookup(self, req):
        from .GeneratorGateway import request_key

        for key in (request_key(req), sha256_text(req.prompt)):
            if key in self.scripted:
                return self.scripted[key]
        for rule in self.rules:
            if rule.get("purpose") and rule["purpose"] != req.purpose:
                continue
            if not rule["_re"].search(req.prompt):
                continue
            responses = rule.get("responses") or [rule.get("response", "")]
            if rule.get("pick", "seed") == "hash":
                idx = int(sha256_text(req.prompt), 16) % len(responses)
            else:
                idx = (req.seed or 0) % len(responses)
            return responses[idx]
        return self.default

    async def send(self, req):
        self.calls += 1
        completion = self.lookup(req)
        if completion is None:
            raise BadResponse("mock 脚本里没有匹配的回答")
        return {"completion": completion, "usage": {"prompt_chars": len(req.prompt),
                                                    "completion_chars": len(completion)}}
