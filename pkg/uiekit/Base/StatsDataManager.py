from .BaseDataManager import BaseDataManager

COUNTERS = "counters"
LEVELS = "levels"
INCOMPLETE = "incomplete"


class StatsDataManager(BaseDataManager):
    """
    功能：
    运行统计（各阶段计数、level 分布、未完成的实例）

    {
        "counters": {stage: {name: int}},
        "levels": {task: {level: int}},
        "incomplete": [instance_id, ...]
    }
    """

    def on_load(self):
        self.data.setdefault(COUNTERS, {})
        self.data.setdefault(LEVELS, {})
        self.data.setdefault(INCOMPLETE, [])

    def count(self, stage, name, n=1):
        with self.lock:
            self.data[COUNTERS].setdefault(stage, {})
            self.data[COUNTERS][stage].setdefault(name, 0)
            self.data[COUNTERS][stage][name] += n

    def get_count(self, stage, name):
        return self.data[COUNTERS].get(stage, {}).get(name, 0)

    def counters(self, stage):
        return dict(self.data[COUNTERS].get(stage, {}))

    def record_level(self, task, level):
        with self.lock:
            levels = self.data[LEVELS].setdefault(str(task), {})
            levels[str(level)] = levels.get(str(level), 0) + 1

    def mark_incomplete(self, instance_id):
        with self.lock:
            if instance_id not in self.data[INCOMPLETE]:
                self.data[INCOMPLETE].append(instance_id)

    def mark_complete(self, instance_id):
        with self.lock:
            if instance_id in self.data[INCOMPLETE]:
                self.data[INCOMPLETE].remove(instance_id)

    def incomplete(self):
        return list(self.data[INCOMPLETE])

    def begin_stage(self, stage, *sections):
        """一次运行开始前清掉该阶段的计数和它独占的分区（LEVELS / INCOMPLETE），重跑不会累加"""
        with self.lock:
            self.data[COUNTERS].pop(stage, None)
            for section in sections:
                self.data[section] = type(self.data[section])()

    def reset(self):
        with self.lock:
            self.data = {}
            self.on_load()
