class SchemaError(Exception):
    def __init__(self, message="schema 不合法。"):
        self.message = message
        super().__init__(self.message)


class EmptySchema(SchemaError):
    def __init__(self, message="schema 至少需要一个类别。"):
        super().__init__(message)


class DuplicateClass(SchemaError):
    def __init__(self, class_id=""):
        self.class_id = class_id
        super().__init__(f"重复的类别: {class_id}")


class MissingArguments(SchemaError):
    def __init__(self, class_id=""):
        self.class_id = class_id
        super().__init__(f"事件类别 {class_id} 没有列出任何论元角色")


class MalformedJson(SchemaError):
    def __init__(self, message="schema JSON 无法解析。"):
        super().__init__(message)


class SchemaViolation(SchemaError):
    def __init__(self, message="schema 违反约束。"):
        super().__init__(message)
