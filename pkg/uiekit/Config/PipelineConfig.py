"""
流水线配置：默认值 -> --config JSON -> 环境变量 -> 命令行参数，后者覆盖前者。
"""
import json
import os
from typing import Literal, Optional

from ncatbot.utils.logger import get_log
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..Base.utils import canonical_dumps, sha256_json
from ..Reward.Exceptions import InvalidConfig
from ..Reward.RewardEngine import RewardConfig, check_reward_config
from .Exceptions import ConfigError

log = get_log()

ENV_KEYS = {
    "GATEWAY_URL": ("gateway", "url"),
    "GATEWAY_KEY": ("gateway", "key"),
    "GATEWAY_CACHE_DIR": ("gateway", "cache_dir"),
}


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True)


class ForgeConfig(_Section):
    n_per_dim: int = Field(default=5, ge=1)
    p: int = Field(default=5, ge=1)
    o: int = Field(default=3, ge=0)
    # None 表示用包里自带的 paradigms.json
    paradigms: Optional[str] = None
    seed: int = 0
    blank_retries: int = Field(default=2, ge=0)
    prompt_dir: Optional[str] = None


class DatasetConfig(_Section):
    adapter: str = "native"
    keep_ratio: float = Field(default=0.4, ge=0.0, le=1.0)
    hiding_fraction: float = Field(default=0.10, ge=0.0, le=1.0)
    # 只写进数据集 header，给外部训练器用
    lambda_cot: float = Field(default=0.5, ge=0.0)
    lambda_struct: float = Field(default=0.5, ge=0.0)
    seed: int = 0


class GrpoConfig(_Section):
    g: int = Field(default=8, ge=2)
    max_len: int = Field(default=2048, gt=0)
    batch_size: int = Field(default=128, ge=1)
    lr: float = 5e-7
    kl_coeff: float = 0.01
    eta: float = Field(default=0.1, ge=0.0)
    steps: int = Field(default=200, ge=0)
    seed: int = 0
    strategy_mode: Literal["none", "free", "random", "relevance"] = "free"

    def export_block(self):
        return {"G": self.g, "max_len": self.max_len, "kl_coeff": self.kl_coeff, "lr": self.lr,
                "batch": self.batch_size}


class GatewayConfig(_Section):
    url: str = ""
    key: str = Field(default="", exclude=True, repr=False)
    model: str = ""
    # 缓存位置不影响生成结果，不进 header 和 config_hash
    cache_dir: Optional[str] = Field(default="data/gateway_cache", exclude=True)
    max_inflight: int = Field(default=8, ge=1)
    max_retries: int = Field(default=3, ge=0)
    backoff_base: float = Field(default=0.5, ge=0.0)
    strategy_temperature: float = Field(default=1.0, ge=0.0)
    judge_temperature: float = Field(default=0.0, ge=0.0)
    max_tokens: int = Field(default=2048, gt=0)
    timeout: float = Field(default=60.0, gt=0)

    def epoch(self):
        """影响生成结果的字段变了，缓存就换一个文件"""
        return sha256_json({"model": self.model, "strategy_temperature": self.strategy_temperature,
                            "judge_temperature": self.judge_temperature, "max_tokens": self.max_tokens})


class PipelineConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    forge: ForgeConfig = ForgeConfig()
    dataset: DatasetConfig = DatasetConfig()
    reward: RewardConfig = RewardConfig()
    grpo: GrpoConfig = GrpoConfig()
    gateway: GatewayConfig = GatewayConfig()

    def resolved(self):
        """可以写进日志和输出 header 的配置（不含密钥）"""
        return self.model_dump(mode="json")

    def config_hash(self):
        return sha256_json(self.resolved())

    def log_resolved(self):
        log.info(f"配置 ({self.config_hash()[:12]}): {canonical_dumps(self.resolved())}")


def _merge(base, extra):
    out = dict(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def _set_dotted(tree, dotted, value):
    parts = dotted.split(".")
    node = tree
    for part in parts[:-1]:
        node = node.setdefault(part, {})
    node[parts[-1]] = value


def load_config(path=None, env=None, overrides=None):
    """
    Args:
        path: JSON 配置文件
        env: 环境变量（默认 os.environ）
        overrides: {"forge.seed": 3, ...}，命令行参数
    Raises:
        ConfigError
    """
    tree = PipelineConfig().model_dump()
    if path:
        try:
            with open(path, "r", encoding="utf-8") as f:
                tree = _merge(tree, json.load(f))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"无法读取配置文件 {path}: {e}")
    env = os.environ if env is None else env
    for name, (section, field) in ENV_KEYS.items():
        if env.get(name):
            tree[section][field] = env[name]
    for dotted, value in (overrides or {}).items():
        if value is not None:
            _set_dotted(tree, dotted, value)
    try:
        cfg = PipelineConfig.model_validate(tree)
        check_reward_config(cfg.reward)
    except (ValidationError, InvalidConfig) as e:
        raise ConfigError(str(e))
    return cfg
