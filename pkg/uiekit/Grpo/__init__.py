from .Exceptions import EmptyPool, GrpoError, PolicyFailure
from .GrpoAlign import (
    DynamicsLog,
    GroupSample,
    group_advantages,
    majority_predictions,
    run_alignment_loop,
    sample_group,
    score_group,
)
from .Policies import BanditPolicy, GatewayPolicy, PolicyAdapter, ScriptedPolicy, bandit_completions

__all__ = [
    "EmptyPool", "GrpoError", "PolicyFailure",
    "DynamicsLog", "GroupSample", "group_advantages", "majority_predictions", "run_alignment_loop", "sample_group",
    "score_group",
    "BanditPolicy", "GatewayPolicy", "PolicyAdapter", "ScriptedPolicy", "bandit_completions",
]
