from .Exceptions import ScorerError, SubtaskRequired
from .MicroF1 import MatchCounts, MetricRow, count_matches, match_units, micro_f1
from .Report import Report, build_report, merge_reports, score_files

__all__ = [
    "ScorerError", "SubtaskRequired",
    "MatchCounts", "MetricRow", "count_matches", "match_units", "micro_f1",
    "Report", "build_report", "merge_reports", "score_files",
]
