from .Exceptions import ConfigError
from .PipelineConfig import DatasetConfig, ForgeConfig, GatewayConfig, GrpoConfig, PipelineConfig, load_config

__all__ = ["ConfigError", "DatasetConfig", "ForgeConfig", "GatewayConfig", "GrpoConfig", "PipelineConfig",
           "load_config"]
