from .Adapters import ADAPTERS, get_adapter, register_adapter
from .Corpus import RL, SFT, CorpusRecord, ReasoningInstance
from .DatasetPipeline import (
    CurationRules,
    SftSample,
    curate_corpus,
    inject_strategy_hiding,
    level_histogram,
    render_base_sft,
    render_sft,
    route_instances,
    subsample_negatives,
)

__all__ = [
    "ADAPTERS", "get_adapter", "register_adapter", "RL", "SFT", "CorpusRecord", "ReasoningInstance",
    "CurationRules", "SftSample", "curate_corpus", "inject_strategy_hiding", "level_histogram",
    "render_base_sft", "render_sft", "route_instances", "subsample_negatives",
]
