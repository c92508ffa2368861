"""
奖励打分 HTTP 接口（aiohttp）

    POST /reward        {x, schema, strategy?, completion, gold, config?} -> {r_result, r_process, r_total, diagnostics}
    POST /reward/batch  {"items": [...]} 或数组 -> {"results": [...]}
    GET  /health
"""
import traceback
from typing import Any, List, Optional

from aiohttp import web
from ncatbot.utils.logger import get_log
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..Records.ExtractionRecord import records_from_json
from ..Schema.Exceptions import SchemaError
from ..Schema.UnifiedSchema import compile_schema
from .Exceptions import RewardError
from .RewardEngine import RewardConfig, check_reward_config, score_completion

log = get_log()

CONFIG_KEY = web.AppKey("reward_config", RewardConfig)


class RewardRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    x: str
    schema_ref: Any = Field(alias="schema")
    strategy: Optional[str] = None
    completion: str
    gold: List[dict] = []
    config: Optional[dict] = None


class BatchRequest(BaseModel):
    items: List[RewardRequest]


def resolve_config(default, override=None):
    if not override:
        return default
    return check_reward_config(RewardConfig(**{**default.model_dump(), **override}))


def score_request(req, default_cfg):
    """
    Raises:
        SchemaError / ValueError / RewardError: 请求内容不合法
    """
    if not isinstance(req, RewardRequest):
        req = RewardRequest.model_validate(req)
    cfg = resolve_config(default_cfg, req.config)
    s = compile_schema(req.schema_ref)
    gold = records_from_json(req.gold)
    return score_completion(req.completion, req.x, s, gold, cfg, req.strategy)


def _error(status, message):
    return web.json_response({"error": message}, status=status)


async def handle_reward(request):
    try:
        body = await request.json()
        result = score_request(RewardRequest.model_validate(body), request.app[CONFIG_KEY])
    except (ValidationError, SchemaError, RewardError, ValueError) as e:
        return _error(400, str(e))
    except Exception as e:
        log.error(traceback.format_exc())
        return _error(500, str(e))
    return web.json_response(result.to_json())


async def handle_batch(request):
    try:
        body = await request.json()
        if isinstance(body, list):
            body = {"items": body}
        batch = BatchRequest.model_validate(body)
        results = [score_request(item, request.app[CONFIG_KEY]).to_json() for item in batch.items]
    except (ValidationError, SchemaError, RewardError, ValueError) as e:
        return _error(400, str(e))
    except Exception as e:
        log.error(traceback.format_exc())
        return _error(500, str(e))
    return web.json_response({"results": results})


async def handle_health(request):
    return web.json_response({"status": "ok", "config": request.app[CONFIG_KEY].model_dump()})


def create_app(cfg=None):
    cfg = check_reward_config(cfg or RewardConfig())
    app = web.Application()
    app[CONFIG_KEY] = cfg
    app.router.add_post("/reward", handle_reward)
    app.router.add_post("/reward/batch", handle_batch)
    app.router.add_get("/health", handle_health)
    return app


def serve(cfg=None, host="127.0.0.1", port=8080):
    log.info(f"奖励服务启动: http://{host}:{port}")
    web.run_app(create_app(cfg), host=host, port=port)
