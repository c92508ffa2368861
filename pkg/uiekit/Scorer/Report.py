"""
评测报告：按数据集名排序，每个数据集一行（EE 两行：trigger、argument），纯文本 + JSON。
"""
import os

import pandas as pd
from ncatbot.utils.logger import get_log

from ..Base.utils import read_json, read_jsonl, write_json
from ..Dataset.Corpus import CorpusRecord
from ..Records.Exceptions import RecordError
from ..Records.ExtractionRecord import records_from_json
from ..Records.OutputParser import canonicalize, parse_completion
from ..Schema.UnifiedSchema import Subtask, TaskKind
from .MicroF1 import NO_SUBTASK, MetricRow, count_matches, micro_f1

log = get_log()

COLUMNS = ["dataset", "task", "subtask", "precision", "recall", "f1"]
REPORT_FORMAT = "micro-f1"
_SUBTASK_ORDER = {NO_SUBTASK: 0, Subtask.TRIGGER.value: 1, Subtask.ARGUMENT.value: 2}


class Report:

    def __init__(self, rows):
        self.rows = sorted(rows, key=lambda r: (r.dataset, r.task, _SUBTASK_ORDER.get(r.subtask, 3)))
        self.frame = pd.DataFrame([r.to_json() for r in self.rows],
                                  columns=COLUMNS + ["tp", "fp", "fn", "degenerate"])

    def __len__(self):
        return len(self.rows)

    def to_text(self):
        """F1 等以百分数显示，保留两位"""
        if self.frame.empty:
            return "  ".join(COLUMNS) + "\n"
        shown = self.frame[COLUMNS].copy()
        for col in ("precision", "recall", "f1"):
            shown[col] = shown[col].map(lambda v: f"{100 * v:.2f}")
        return shown.to_string(index=False) + "\n"

    def to_json(self):
        return {"format": REPORT_FORMAT, "rows": [r.to_json() for r in self.rows]}

    def save(self, out_dir):
        os.makedirs(out_dir, exist_ok=True)
        text_path = os.path.join(out_dir, "report.txt")
        with open(text_path, "w", encoding="utf-8") as f:
            f.write(self.to_text())
        json_path = write_json(os.path.join(out_dir, "report.json"), self.to_json())
        log.info(f"评测报告已写入 {text_path}")
        return text_path, json_path


def build_report(rows):
    return Report(rows)


def _prediction(row, s):
    if "completion" in row:
        return parse_completion(row["completion"], s).records
    return canonicalize(records_from_json(row.get("records", row.get("prediction", []))), s)


def score_files(pred_path, gold_path, task=None):
    """
    预测与 gold 两个 JSONL，按 id 对齐。
    预测行可以是 {"id", "records"} 或 {"id", "completion"}（模型原始输出）；
    解析失败或缺失的预测按空集计。
    """
    _, gold_rows = read_jsonl(gold_path)
    _, pred_rows = read_jsonl(pred_path)
    preds = {str(r["id"]): r for r in pred_rows}
    task = TaskKind(task.upper()) if isinstance(task, str) else task

    buckets = {}
    missing = unparseable = 0
    for obj in gold_rows:
        record = CorpusRecord.from_json(obj)
        if task is not None and record.task != task:
            continue
        s = record.schema_ref
        row = preds.pop(record.id, None)
        pred = ()
        if row is None:
            missing += 1
        else:
            try:
                pred = _prediction(row, s)
            except (RecordError, ValueError):
                unparseable += 1
        gold = canonicalize(record.gold, s)
        dataset = record.source or s.source_name
        subtasks = (Subtask.TRIGGER, Subtask.ARGUMENT) if record.task == TaskKind.EE else (None,)
        for sub in subtasks:
            key = (dataset, record.task, sub)
            buckets.setdefault(key, []).append(count_matches(pred, gold, record.task, sub))
    if missing or unparseable:
        log.warning(f"缺失预测 {missing} 条，无法解析 {unparseable} 条，按空集计")
    if preds:
        log.warning(f"{len(preds)} 条预测在 gold 中找不到对应 id，已忽略")
    rows = [micro_f1(counts, dataset, t, sub or NO_SUBTASK) for (dataset, t, sub), counts in buckets.items()]
    return build_report(rows)


def merge_reports(paths):
    """同一 (dataset, task, subtask) 出现多次时后面的覆盖前面的"""
    merged = {}
    for path in paths:
        doc = read_json(path)
        for obj in doc.get("rows", []):
            row = MetricRow.from_json(obj)
            merged[(row.dataset, row.task, row.subtask)] = row
    return build_report(merged.values())
