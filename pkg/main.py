# ========= 导入必要模块 ==========
import argparse
import asyncio
import functools
import json
import os
import sys
import traceback

from ncatbot.utils.logger import get_log

from uiekit import __version__
from uiekit.Base.StatsDataManager import INCOMPLETE, LEVELS, StatsDataManager
from uiekit.Base.utils import read_json, read_jsonl, write_json, write_jsonl
from uiekit.Config.Exceptions import ConfigError
from uiekit.Config.PipelineConfig import load_config
from uiekit.Dataset.Adapters import get_adapter
from uiekit.Dataset.Corpus import RL, SFT, ReasoningInstance
from uiekit.Dataset.DatasetPipeline import (
    CURATE,
    CurationRules,
    curate_corpus,
    inject_strategy_hiding,
    level_histogram,
    render_base_sft,
    render_sft,
    route_instances,
    subsample_negatives,
)
from uiekit.Gateway.GeneratorGateway import build_gateway
from uiekit.Grpo.GrpoAlign import majority_predictions, run_alignment_loop
from uiekit.Grpo.Policies import BanditPolicy, GatewayPolicy
from uiekit.Reward.RewardServer import score_request, serve
from uiekit.Schema.UnifiedSchema import compile_schema, load_schemas, schema_stats
from uiekit.Scorer.Report import merge_reports, score_files
from uiekit.StrategyForge.Convergence import load_paradigms
from uiekit.StrategyForge.Prompts import DEFAULT_PARADIGMS
from uiekit.StrategyForge.StrategyForge import BUILD_REASONING, StrategyForge
from uiekit.StrategyForge.StrategyRepository import MODES, StrategyRepository

log = get_log()

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def cli_command(command_name):
    """子命令异常统一记日志（带 traceback）并返回非零退出码"""
    def decorator(func):
        @functools.wraps(func)
        def wrapper(args, cfg):
            log.info(f"执行 {command_name}")
            try:
                status = func(args, cfg)
                return EXIT_OK if status is None else status
            except Exception as e:
                log.error(f"{command_name} 命令异常: {e}")
                log.error(traceback.format_exc())
                return EXIT_RUNTIME
        return wrapper
    return decorator


# ========== 读写工具 ==========

def _schemas(path):
    if not path:
        return {}
    return {s.source_name: s for s in load_schemas(path)}


def _load_records(path, schemas=None, adapter="native"):
    _, rows = read_jsonl(path)
    fn = get_adapter(adapter)
    return [fn(row, schemas, i) for i, row in enumerate(rows)]


def _load_instances(path):
    _, rows = read_jsonl(path)
    return [ReasoningInstance.from_json(row) for row in rows]


def _out(args, default):
    return args.out or default


def _sibling(path, name):
    return os.path.join(os.path.dirname(os.path.abspath(path)), name)


# ========== 子命令 ==========

@cli_command("schema compile")
def cmd_schema_compile(args, cfg):
    raw = read_json(args.input)
    items = raw if isinstance(raw, list) else [raw]
    compiled = [compile_schema(item, args.task, args.source) for item in items]
    for s in compiled:
        log.info(f"schema 统计: {schema_stats(s)}")
    write_json(_out(args, "schemas.json"), [s.to_json() for s in compiled])


@cli_command("curate")
def cmd_curate(args, cfg):
    schemas = _schemas(args.schemas)
    rules = CurationRules(adapter=args.adapter or cfg.dataset.adapter, schemas=schemas, source=args.source)
    _, raw = read_jsonl(args.input)
    out = _out(args, "corpus.jsonl")
    stats = StatsDataManager(_sibling(out, "stats.json"))
    stats.begin_stage(CURATE)
    records = curate_corpus(raw, rules, stats)
    records = subsample_negatives(records, cfg.dataset.keep_ratio, cfg.dataset.seed)
    for s in {r.schema_ref.source_name: r.schema_ref for r in records}.values():
        log.info(f"schema 统计: {schema_stats(s)}")
    write_jsonl(out, [r.to_json() for r in records], fmt="corpus", config=cfg.resolved())
    stats.save_sync()
    if args.base_sft:
        samples = render_base_sft(records)
        write_jsonl(args.base_sft, [s.to_json() for s in samples], fmt="base-sft", config=cfg.resolved())
        log.info(f"基础指令数据: {len(samples)} 条 -> {args.base_sft}")


@cli_command("build-reasoning")
def cmd_build_reasoning(args, cfg):
    records = _load_records(args.corpus, _schemas(args.schemas))
    out = _out(args, "reasoning.jsonl")
    stats = StatsDataManager(_sibling(out, "stats.json"))
    stats.begin_stage(BUILD_REASONING, LEVELS, INCOMPLETE)
    gateway = build_gateway(cfg.gateway, mock_path=args.mock)
    paradigms = load_paradigms(cfg.forge.paradigms or DEFAULT_PARADIGMS)
    forge = StrategyForge.from_config(gateway, paradigms, cfg, stats)
    instances = asyncio.run(forge.build_corpus(records))
    gateway.flush()
    stats.save_sync()
    write_jsonl(out, [inst.to_json() for inst in instances], fmt="reasoning", config=cfg.resolved())
    hist = level_histogram(instances, cfg.forge.p)
    log.info(f"level 分布:\n{hist.to_string(index=False)}")
    write_json(_sibling(out, "levels.json"), json.loads(hist.to_json(orient="records")))
    missing = stats.incomplete()
    if missing:
        log.warning(f"{len(missing)} 个实例未完成，重新运行会复用缓存继续: {missing}")
        return EXIT_RUNTIME


@cli_command("render-sft")
def cmd_render_sft(args, cfg):
    instances = [inst for inst in _load_instances(args.reasoning) if inst.route == SFT]
    samples = inject_strategy_hiding(render_sft(instances), cfg.dataset.hiding_fraction, cfg.dataset.seed)
    write_jsonl(_out(args, "sft.jsonl"), [s.to_json() for s in samples], fmt="reasoning-sft",
                config=cfg.resolved(),
                loss_weights={"cot": cfg.dataset.lambda_cot, "struct": cfg.dataset.lambda_struct})


@cli_command("route")
def cmd_route(args, cfg):
    out_dir = _out(args, "routed")
    sft, rl = route_instances(_load_instances(args.reasoning), cfg.forge.o)
    for inst in sft:
        inst.route = SFT
    for inst in rl:
        inst.route = RL
    write_jsonl(os.path.join(out_dir, "sft.jsonl"), [i.to_json() for i in sft], fmt="reasoning",
                config=cfg.resolved())
    write_jsonl(os.path.join(out_dir, "rl.jsonl"), [i.to_json() for i in rl], fmt="reasoning",
                config=cfg.resolved())
    StrategyRepository.from_instances(sft).save(os.path.join(out_dir, "strategies.jsonl"), cfg.resolved())


@cli_command("reward serve")
def cmd_reward_serve(args, cfg):
    serve(cfg.reward, args.host, args.port)


@cli_command("reward score")
def cmd_reward_score(args, cfg):
    _, rows = read_jsonl(args.input)
    results = []
    for i, row in enumerate(rows):
        breakdown = score_request(row, cfg.reward)
        results.append({"id": row.get("id", i), **breakdown.to_json()})
    write_jsonl(_out(args, "rewards.jsonl"), results, fmt="rewards", config=cfg.resolved())
    if results:
        mean = sum(r["r_total"] for r in results) / len(results)
        log.info(f"打分完成: {len(results)} 条，平均 R = {mean:.4f}")


@cli_command("grpo sim")
def cmd_grpo_sim(args, cfg):
    out_dir = _out(args, "grpo")
    pool = _load_instances(args.pool)
    repository = StrategyRepository.load(args.strategies) if args.strategies else None
    gateway = None
    if args.policy == "gateway":
        gateway = build_gateway(cfg.gateway, mock_path=args.mock)
        policy = GatewayPolicy(gateway, cfg.gateway.strategy_temperature)
    else:
        policy = BanditPolicy(eta=cfg.grpo.eta)
    dynamics = asyncio.run(run_alignment_loop(
        pool, policy, cfg.grpo, cfg.reward, steps=args.steps, out_path=os.path.join(out_dir, "rollouts.jsonl"),
        repository=repository, config=cfg.resolved()))
    dynamics.save(os.path.join(out_dir, "dynamics.csv"), os.path.join(out_dir, "dynamics.json"))
    predictions = asyncio.run(majority_predictions(pool, policy, cfg.grpo, step=len(dynamics)))
    if gateway is not None:
        gateway.flush()
    write_jsonl(os.path.join(out_dir, "predictions.jsonl"), predictions, fmt="predictions", config=cfg.resolved())
    rewards = dynamics.rewards()
    if rewards:
        log.info(f"平均奖励: 第一步 {rewards[0]:.4f} -> 最后一步 {rewards[-1]:.4f}")


@cli_command("score")
def cmd_score(args, cfg):
    report = score_files(args.pred, args.gold, args.task)
    report.save(_out(args, "report"))
    log.info(f"评测结果:\n{report.to_text()}")


@cli_command("report")
def cmd_report(args, cfg):
    report = merge_reports(args.inputs)
    report.save(_out(args, "report"))
    log.info(f"合并报告:\n{report.to_text()}")


# ========== 参数解析 ==========

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON 配置文件")
    common.add_argument("--seed", type=int, help="覆盖所有阶段的随机种子")
    common.add_argument("--mock", help="MockTransport 脚本（离线运行）")
    common.add_argument("--cache-dir", dest="cache_dir", help="生成缓存目录")
    common.add_argument("--out", help="输出文件或目录")

    parser = argparse.ArgumentParser(prog="uiekit", description="推理驱动的统一信息抽取数据 / 奖励 / 评测工具")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    schema = sub.add_parser("schema", help="schema 工具").add_subparsers(dest="action", required=True)
    p = schema.add_parser("compile", parents=[common], help="把原始 schema 编译成统一 schema")
    p.add_argument("--input", required=True)
    p.add_argument("--task", choices=["NER", "RE", "EE"], type=str.upper)
    p.add_argument("--source")
    p.set_defaults(handler=cmd_schema_compile)

    p = sub.add_parser("curate", parents=[common], help="格式改写、过滤、去重、负样本下采样")
    p.add_argument("--input", required=True)
    p.add_argument("--schemas")
    p.add_argument("--adapter")
    p.add_argument("--source")
    p.add_argument("--base-sft", dest="base_sft", help="同时输出第一阶段指令数据")
    p.set_defaults(handler=cmd_curate)

    p = sub.add_parser("build-reasoning", parents=[common], help="多视角推理数据构建")
    p.add_argument("--corpus", required=True)
    p.add_argument("--schemas")
    p.set_defaults(handler=cmd_build_reasoning)

    p = sub.add_parser("render-sft", parents=[common], help="渲染推理 SFT 样本并注入策略隐藏")
    p.add_argument("--reasoning", required=True)
    p.set_defaults(handler=cmd_render_sft)

    p = sub.add_parser("route", parents=[common], help="按 level 分流到 SFT / RL")
    p.add_argument("--reasoning", required=True)
    p.set_defaults(handler=cmd_route)

    reward = sub.add_parser("reward", help="奖励服务").add_subparsers(dest="action", required=True)
    p = reward.add_parser("serve", parents=[common], help="启动 HTTP 打分服务")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.set_defaults(handler=cmd_reward_serve)
    p = reward.add_parser("score", parents=[common], help="给 JSONL 里的输出打分")
    p.add_argument("--input", required=True)
    p.set_defaults(handler=cmd_reward_score)

    grpo = sub.add_parser("grpo", help="GRPO 模拟").add_subparsers(dest="action", required=True)
    p = grpo.add_parser("sim", parents=[common], help="在 RL 实例池上跑对齐循环")
    p.add_argument("--pool", required=True)
    p.add_argument("--steps", type=int)
    p.add_argument("--policy", choices=["bandit", "gateway"], default="bandit")
    p.add_argument("--strategies", help="strategy 仓库 JSONL")
    p.add_argument("--strategy-mode", dest="strategy_mode", choices=MODES)
    p.set_defaults(handler=cmd_grpo_sim)

    p = sub.add_parser("score", parents=[common], help="Micro-F1 评测")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--task", type=str.upper, choices=["NER", "RE", "EE"])
    p.set_defaults(handler=cmd_score)

    p = sub.add_parser("report", parents=[common], help="合并多个评测结果")
    p.add_argument("--inputs", nargs="+", required=True)
    p.set_defaults(handler=cmd_report)
    return parser


def resolve_config(args):
    overrides = {"gateway.cache_dir": args.cache_dir}
    if args.seed is not None:
        for section in ("forge", "dataset", "grpo"):
            overrides[f"{section}.seed"] = args.seed
    if getattr(args, "strategy_mode", None):
        overrides["grpo.strategy_mode"] = args.strategy_mode
    return load_config(args.config, overrides=overrides)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        cfg = resolve_config(args)
    except ConfigError as e:
        log.error(f"配置不合法: {e}")
        return EXIT_USAGE
    cfg.log_resolved()
    return args.handler(args, cfg)


# ========== 启动 ==========

if __name__ == "__main__":
    sys.exit(main())
