class ForgeError(Exception):
    def __init__(self, message="推理数据构建失败。"):
        self.message = message
        super().__init__(self.message)


class InvalidParadigms(ForgeError):
    def __init__(self, message="范式配置不合法。"):
        super().__init__(message)


class MissingTemplate(ForgeError):
    def __init__(self, name=""):
        self.name = name
        super().__init__(f"找不到提示词模板: {name}")
