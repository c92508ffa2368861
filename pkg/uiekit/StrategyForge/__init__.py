from .Convergence import (
    cluster_by_paradigm,
    embed_tfidf,
    load_paradigms,
    pick_representatives,
    representative_pool,
    sample_core,
    tokenize,
)
from .Prompts import DEFAULT_PARADIGMS
from .Strategy import AnalyticalDimension, Paradigm, ReasoningTrace, Strategy, StrategyCluster
from .StrategyForge import StrategyForge
from .StrategyRepository import StrategyRepository

__all__ = [
    "StrategyForge", "StrategyRepository", "AnalyticalDimension", "Paradigm", "ReasoningTrace", "Strategy",
    "StrategyCluster", "cluster_by_paradigm", "embed_tfidf", "load_paradigms", "pick_representatives",
    "representative_pool", "sample_core", "tokenize", "DEFAULT_PARADIGMS",
]
