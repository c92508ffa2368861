import json

import pytest

from .Exceptions import ConfigError
from .PipelineConfig import PipelineConfig, load_config


def test_defaults():
    cfg = load_config(env={})
    assert (cfg.forge.n_per_dim, cfg.forge.p, cfg.forge.o) == (5, 5, 3)
    assert (cfg.reward.alpha, cfg.reward.beta, cfg.reward.lambda1, cfg.reward.lambda2) == (2.0, 1.0, 0.9, 0.1)
    assert cfg.reward.mode == "strict"
    assert (cfg.grpo.g, cfg.grpo.max_len, cfg.grpo.batch_size) == (8, 2048, 128)
    assert cfg.dataset.keep_ratio == 0.4
    assert cfg.dataset.hiding_fraction == 0.1
    assert cfg.gateway.max_inflight == 8


def test_load_order(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"forge": {"p": 4, "seed": 1}, "gateway": {"url": "http://file"}}), encoding="utf-8")
    cfg = load_config(str(path), env={"GATEWAY_URL": "http://env", "GATEWAY_KEY": "secret"},
                      overrides={"forge.seed": 9, "gateway.cache_dir": None})
    assert cfg.forge.p == 4
    assert cfg.forge.seed == 9
    assert cfg.gateway.url == "http://env"
    assert cfg.gateway.key == "secret"
    assert cfg.gateway.cache_dir == "data/gateway_cache"


def test_key_never_in_resolved_config():
    cfg = load_config(env={"GATEWAY_KEY": "secret"})
    assert "secret" not in json.dumps(cfg.resolved())
    assert cfg.config_hash() == load_config(env={}).config_hash()


def test_invalid_values_raise_config_error(tmp_path):
    with pytest.raises(ConfigError):
        load_config(overrides={"reward.lambda1": 0.5}, env={})
    with pytest.raises(ConfigError):
        load_config(overrides={"grpo.g": 1}, env={})
    with pytest.raises(ConfigError):
        load_config(overrides={"forge.unknown": 1}, env={})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(bad), env={})
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"), env={})


def test_hash_and_epoch():
    a = PipelineConfig()
    b = load_config(overrides={"forge.seed": 1}, env={})
    assert a.config_hash() == PipelineConfig().config_hash()
    assert a.config_hash() != b.config_hash()
    # 只有影响生成结果的字段才换缓存
    assert a.gateway.epoch() == b.gateway.epoch()
    c = load_config(overrides={"gateway.strategy_temperature": 0.7}, env={})
    assert c.gateway.epoch() != a.gateway.epoch()
