class DatasetError(Exception):
    def __init__(self, message="数据集处理失败。"):
        self.message = message
        super().__init__(self.message)


class UnknownAdapter(DatasetError):
    def __init__(self, name=""):
        self.name = name
        super().__init__(f"没有注册的数据格式适配器: {name}")


class RouteMismatch(DatasetError):
    def __init__(self, message="render_sft 只接受 route=SFT 的实例。"):
        super().__init__(message)
