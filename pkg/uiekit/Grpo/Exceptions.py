class GrpoError(Exception):
    def __init__(self, message="GRPO 对齐出错。"):
        self.message = message
        super().__init__(self.message)


class PolicyFailure(GrpoError):
    def __init__(self, message="策略模型没有返回完整的一组输出。"):
        super().__init__(message)


class EmptyPool(GrpoError):
    def __init__(self, message="RL 实例池为空，无法开始对齐。"):
        super().__init__(message)
