class ConfigError(Exception):
    def __init__(self, message="配置文件或参数不合法。"):
        self.message = message
        super().__init__(self.message)
