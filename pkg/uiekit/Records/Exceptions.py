class RecordError(Exception):
    def __init__(self, message="抽取结果处理失败。"):
        self.message = message
        super().__init__(self.message)


class UnbalancedMarkers(RecordError):
    def __init__(self, message="<think> 标记不成对或顺序颠倒。"):
        super().__init__(message)


class Unparseable(RecordError):
    def __init__(self, message="回答中找不到可解析的 JSON。"):
        super().__init__(message)
