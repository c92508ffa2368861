from .BaseDataManager import BaseDataManager
from .StatsDataManager import StatsDataManager

__all__ = ["BaseDataManager", "StatsDataManager"]
