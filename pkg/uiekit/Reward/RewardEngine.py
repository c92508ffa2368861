"""
多粒度奖励：

    R_result   类别视图与论元视图的加权调和平均，按 2αβ/(α+β) 归一到 [0, 1]
    R_process  三项规则检查（schema 遵循 / 输入依据 / 策略合理）通过数 / 3
    R          λ₁·R_result + λ₂·R_process
"""
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Literal

from ncatbot.utils.logger import get_log
from pydantic import BaseModel, ConfigDict

from ..Base.utils import normalize_ws, tokenize
from ..Records.Exceptions import UnbalancedMarkers, Unparseable
from ..Records.ExtractionRecord import Entity, Event, Relation
from ..Records.OutputParser import THINK_OPEN, canonicalize, parse_model_output, split_reasoning
from .Exceptions import InvalidConfig

log = get_log()

STRICT = "strict"
SOFT = "soft"

LAMBDA_TOLERANCE = 1e-9
PROCESS_CHECKS = ("schema_adherence", "input_grounding", "strategy_soundness")

# 推理里引用标签的写法：type: PER / relation = work_for / 角色：attacker
_CITATION_CUE = re.compile(r"\b(?:type|class|label|relation|event|role)\s*[:=：]\s*[\"'“‘]?", re.IGNORECASE)
_CITED_TOKEN = re.compile(r"[^\s\"'”’,;，。；)\]}]+")
_LABEL_CHAR = re.compile(r"[\w-]")
_STOPWORDS = frozenset(
    "the and for with that this from into then each every all any are was were has have had not but "
    "its their there which when what who how you your our can will should must".split())


class RewardConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: float = 2.0
    beta: float = 1.0
    lambda1: float = 0.9
    lambda2: float = 0.1
    mode: Literal["strict", "soft"] = STRICT


def check_reward_config(cfg):
    """
    Raises:
        InvalidConfig
    """
    if not cfg.alpha > cfg.beta > 0:
        raise InvalidConfig(f"需要 α > β > 0，实际 α={cfg.alpha}, β={cfg.beta}")
    if cfg.lambda1 < 0 or cfg.lambda2 < 0:
        raise InvalidConfig(f"λ 不能为负: λ₁={cfg.lambda1}, λ₂={cfg.lambda2}")
    if abs(cfg.lambda1 + cfg.lambda2 - 1.0) > LAMBDA_TOLERANCE:
        raise InvalidConfig(f"需要 λ₁ + λ₂ = 1，实际为 {cfg.lambda1 + cfg.lambda2}")
    return cfg


@dataclass(frozen=True)
class CategoryArgumentView:
    y_c: Counter
    y_a: Counter


def category_argument_view(records):
    """
    y_c: 类别标签的多重集
    y_a: 论元多重集，NER 为 mention，RE 为 (subject, object)，EE 为触发词和每个 (role, span)
    """
    y_c, y_a = Counter(), Counter()
    for r in records:
        y_c[r.label()] += 1
        if isinstance(r, Entity):
            y_a[("mention", r.mention)] += 1
        elif isinstance(r, Relation):
            y_a[("pair", r.subject, r.object)] += 1
        elif isinstance(r, Event):
            y_a[("trigger", r.trigger)] += 1
            for role, span in r.arguments:
                y_a[("role", role, span)] += 1
    return CategoryArgumentView(y_c, y_a)


def multiset_f1(pred, gold):
    """两边都为空时记 1"""
    if not pred and not gold:
        return 1.0
    tp = sum((pred & gold).values())
    n_pred, n_gold = sum(pred.values()), sum(gold.values())
    if tp == 0:
        return 0.0
    precision, recall = tp / n_pred, tp / n_gold
    return 2 * precision * recall / (precision + recall)


def harmonic_reward(i_c, i_a, alpha, beta):
    """2αβ·I_c·I_a / (α·I_c + β·I_a) / (2αβ / (α+β))；分母为 0 时为 0"""
    denominator = alpha * i_c + beta * i_a
    if denominator == 0:
        return 0.0
    raw = 2 * alpha * beta * i_c * i_a / denominator
    return min(1.0, max(0.0, raw / (2 * alpha * beta / (alpha + beta))))


def result_indicators(pred, gold, mode=STRICT):
    pv, gv = category_argument_view(pred), category_argument_view(gold)
    if mode == STRICT:
        return float(pv.y_c == gv.y_c), float(pv.y_a == gv.y_a)
    return multiset_f1(pv.y_c, gv.y_c), multiset_f1(pv.y_a, gv.y_a)


def result_reward(pred, gold, cfg):
    check_reward_config(cfg)
    i_c, i_a = result_indicators(pred, gold, cfg.mode)
    return harmonic_reward(i_c, i_a, cfg.alpha, cfg.beta)


def _label_at(rest, ordered):
    """rest 开头能整体对上的 schema 标签（最长优先，大小写不敏感）"""
    for label in ordered:
        n = len(label)
        if rest[:n].casefold() == label.casefold() and (n == len(rest) or not _LABEL_CHAR.match(rest[n])):
            return label
    return None


def cited_labels(cot, labels=()):
    """
    推理里跟在 type: / relation = 等提示词后面的标签。
    能对上 schema 标签的取整个标签（可以含空格），否则取到空白或标点为止
    """
    text = cot or ""
    ordered = sorted({label for label in labels if label}, key=len, reverse=True)
    out = []
    for cue in _CITATION_CUE.finditer(text):
        rest = text[cue.end():]
        label = _label_at(rest, ordered)
        if label is None:
            token = _CITED_TOKEN.match(rest)
            label = token.group(0).rstrip(".:!?") if token else ""
        if label:
            out.append(label)
    return out


def content_tokens(text):
    return {t for t in tokenize(text) if len(t) >= 3 and t not in _STOPWORDS}


def process_checks(x, s, strat, cot, pred, hidden=False):
    """
    Returns:
        {"schema_adherence": bool, "input_grounding": bool, "strategy_soundness": bool, ...明细}
    """
    known = {label.casefold() for label in s.labels()}
    off_schema = [label for label in cited_labels(cot, s.labels()) if label.casefold() not in known]
    for r in pred:
        cls = s.get_class(r.label())
        if cls is None:
            off_schema.append(r.label())
        else:
            off_schema.extend(role for role in r.roles() if role not in cls.arguments)

    text = normalize_ws(x)
    ungrounded = [span for r in pred for span in r.spans() if normalize_ws(span) not in text]

    strategy_text = getattr(strat, "text", strat) or ""
    if hidden:
        sound = True
    elif not (cot or "").strip():
        sound = False
    elif strategy_text:
        wanted = content_tokens(strategy_text)
        sound = not wanted or bool(wanted & content_tokens(cot))
    else:
        sound = True

    return {
        "schema_adherence": not off_schema,
        "input_grounding": not ungrounded,
        "strategy_soundness": sound,
        "off_schema_labels": off_schema,
        "ungrounded_spans": ungrounded,
    }


def _passes(checks):
    return sum(checks[k] for k in PROCESS_CHECKS) / 3


def process_reward(x, s, strat, cot, pred, hidden=False):
    """∈ {0, 1/3, 2/3, 1}；hidden 为真（think 为空的隐藏推理输出）时第三项直接通过"""
    return _passes(process_checks(x, s, strat, cot, pred, hidden))


@dataclass
class RewardBreakdown:
    r_result: float
    r_process: float
    r_total: float
    diagnostics: dict = field(default_factory=dict)

    def to_json(self):
        return {"r_result": self.r_result, "r_process": self.r_process, "r_total": self.r_total,
                "diagnostics": self.diagnostics}


def total_reward(r_result, r_process, cfg, diagnostics=None):
    check_reward_config(cfg)
    for name, value in (("r_result", r_result), ("r_process", r_process)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} 必须在 [0, 1] 内: {value}")
    r_total = cfg.lambda1 * r_result + cfg.lambda2 * r_process
    return RewardBreakdown(r_result, r_process, min(1.0, max(0.0, r_total)), diagnostics or {})


def score_completion(completion, x, s, gold, cfg, strategy=None):
    """
    完整打分：拆 think -> 解析 -> R_result / R_process -> R。
    解析失败时全部为 0，原因写进 diagnostics。
    """
    try:
        cot, answer = split_reasoning(completion)
        parse_diag = {}
        pred = parse_model_output(answer, s, parse_diag)
    except (UnbalancedMarkers, Unparseable) as e:
        return total_reward(0.0, 0.0, cfg, {"error": type(e).__name__, "detail": str(e)})
    gold = canonicalize(gold, s)
    hidden = THINK_OPEN in (completion or "") and not cot.strip()
    i_c, i_a = result_indicators(pred, gold, cfg.mode)
    r_result = result_reward(pred, gold, cfg)
    checks = process_checks(x, s, strategy, cot, pred, hidden)
    r_process = _passes(checks)
    diagnostics = {"category_match": i_c, "argument_match": i_a, "hidden": hidden,
                   "parse": parse_diag, "checks": checks}
    return total_reward(r_result, r_process, cfg, diagnostics)
