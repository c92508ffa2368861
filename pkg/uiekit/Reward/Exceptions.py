class RewardError(Exception):
    def __init__(self, message="奖励计算失败。"):
        self.message = message
        super().__init__(self.message)


class InvalidConfig(RewardError):
    def __init__(self, message="奖励配置不合法：需要 α > β > 0，λ₁ + λ₂ = 1，λᵢ ≥ 0。"):
        super().__init__(message)
