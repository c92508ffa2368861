import json
import os
import threading
import traceback
from ncatbot.utils.logger import get_log

log = get_log()


class BaseDataManager:
    """
    JSON 持久化管理器基类。

    - 同一个 file_path 只会创建一个实例（按路径单例）
    - 子类在 on_load 里给 self.data 补默认字段
    - save_sync() 先写临时文件，旧文件留作 .bak，再原子替换
    - 主文件损坏时从 .bak 读
    """
    work_path = "data/data_manager/"
    _instances: dict = {}
    _instances_lock = threading.Lock()

    def __new__(cls, file_path=None, *args, **kwargs):
        key = cls._key(file_path)
        with cls._instances_lock:
            if key not in BaseDataManager._instances:
                BaseDataManager._instances[key] = super().__new__(cls)
                log.debug(f"新建 {cls.__name__}: {key[1]}")
            return BaseDataManager._instances[key]

    def __init__(self, file_path=None, *args, **kwargs):
        if getattr(self, "_initialized", False):
            return
        self.file_path = file_path or self._default_path()
        self.lock = threading.RLock()
        self.data = self._read_existing()
        self.on_load(*args, **kwargs)
        self._initialized = True

    @classmethod
    def _default_path(cls):
        return os.path.join(cls.work_path, f"{cls.__name__}.json")

    @classmethod
    def _key(cls, file_path):
        return cls, os.path.abspath(file_path or cls._default_path())

    @classmethod
    def forget(cls, file_path=None):
        """丢弃某路径的单例（测试或切换输出目录时用）"""
        with cls._instances_lock:
            BaseDataManager._instances.pop(cls._key(file_path), None)

    @property
    def backup_path(self):
        return self.file_path + ".bak"

    def _read_existing(self):
        for path in (self.file_path, self.backup_path):
            if not os.path.exists(path):
                continue
            try:
                with open(path, "r", encoding="utf-8") as f:
                    data = json.load(f)
            except (OSError, json.JSONDecodeError) as e:
                log.warning(f"{self.__class__.__name__} 读取 {path} 失败: {e}")
                continue
            if path == self.backup_path:
                log.warning(f"{self.file_path} 不可用，已从备份恢复")
            return data
        return {}

    def on_load(self, *args, **kwargs):
        pass

    def save_sync(self):
        """
        Returns:
            {"success": True, "path": file_path}
        Raises:
            RuntimeError: 写入失败（原文件保持不变）
        """
        with self.lock:
            tmp_path = self.file_path + ".tmp"
            try:
                os.makedirs(os.path.dirname(os.path.abspath(self.file_path)), exist_ok=True)
                with open(tmp_path, "w", encoding="utf-8") as f:
                    json.dump(self.data, f, ensure_ascii=False, indent=2, sort_keys=True)
            except (OSError, TypeError, ValueError) as e:
                log.error(traceback.format_exc())
                if os.path.exists(tmp_path):
                    os.remove(tmp_path)
                raise RuntimeError(f"保存 {self.file_path} 时出错: {e}")
            if os.path.exists(self.file_path):
                os.replace(self.file_path, self.backup_path)
            os.replace(tmp_path, self.file_path)
            return {"success": True, "path": self.file_path}
