class GatewayError(Exception):
    def __init__(self, message="生成服务调用失败。"):
        self.message = message
        super().__init__(self.message)


class TransientGatewayError(GatewayError):
    """可重试的失败：超时、429、5xx"""

    def __init__(self, message="生成服务暂时不可用，稍后重试。"):
        super().__init__(message)


class Exhausted(GatewayError):
    def __init__(self, message="重试次数已用完。", retries=0):
        self.retries = retries
        super().__init__(message)


class BadResponse(GatewayError):
    def __init__(self, message="生成服务返回了空的或不合协议的结果。"):
        super().__init__(message)


# strategy-forge 向上传播时用的名字
GatewayFailure = GatewayError
