from ..Base.BaseDataManager import BaseDataManager

ENTRIES = "entries"
EPOCH = "epoch"
# 攒够这么多条新结果才写一次盘
FLUSH_EVERY = 64


class GenerationCache(BaseDataManager):
    """
    功能：
    生成结果缓存，按请求内容哈希寻址；一个 epoch 一个文件。
    新结果先留在内存，每 flush_every 条或 flush() 时整体写盘。

    {
        "epoch": str,
        "entries": {request_key: {"completion": str, "usage": {...}}}
    }
    """

    def __init__(self, file_path=None, epoch="", flush_every=FLUSH_EVERY):
        super().__init__(file_path, epoch=epoch, flush_every=flush_every)

    def on_load(self, epoch="", flush_every=FLUSH_EVERY):
        self.data.setdefault(ENTRIES, {})
        self.data.setdefault(EPOCH, epoch)
        self.flush_every = max(1, int(flush_every))
        self.pending = 0

    def get(self, key):
        with self.lock:
            return self.data[ENTRIES].get(key)

    def put(self, key, value):
        """
        已经有同一个 key 时保留旧值并返回旧值
        Returns:
            实际存下的值
        """
        with self.lock:
            existing = self.data[ENTRIES].get(key)
            if existing is not None:
                return existing
            self.data[ENTRIES][key] = value
            self.pending += 1
            if self.pending >= self.flush_every:
                self.flush()
            return value

    def flush(self):
        """Returns: 本次写盘的新条目数"""
        with self.lock:
            written = self.pending
            if written:
                self.save_sync()
                self.pending = 0
            return written

    def __len__(self):
        return len(self.data[ENTRIES])

    def __contains__(self, key):
        return key in self.data[ENTRIES]
