from .RewardEngine import (
    RewardBreakdown,
    RewardConfig,
    category_argument_view,
    check_reward_config,
    process_reward,
    result_reward,
    score_completion,
    total_reward,
)
from .RewardServer import create_app, score_request, serve

__all__ = [
    "RewardBreakdown", "RewardConfig", "category_argument_view", "check_reward_config", "process_reward",
    "result_reward", "score_completion", "total_reward", "create_app", "score_request", "serve",
]
