class ScorerError(Exception):
    def __init__(self, message="评测出错。"):
        self.message = message
        super().__init__(self.message)


class SubtaskRequired(ScorerError):
    def __init__(self, message="EE 评测需要指定子任务（trigger / argument），其他任务不接受子任务。"):
        super().__init__(message)
