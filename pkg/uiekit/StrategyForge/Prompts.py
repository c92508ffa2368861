import os

from .Exceptions import MissingTemplate

PROMPT_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "prompts")
DEFAULT_PARADIGMS = os.path.join(os.path.dirname(os.path.abspath(__file__)), "paradigms.json")

_cache = {}


def load_template(name, prompt_dir=None):
    path = os.path.join(prompt_dir or PROMPT_DIR, f"{name}.txt")
    if path not in _cache:
        if not os.path.exists(path):
            raise MissingTemplate(path)
        with open(path, "r", encoding="utf-8") as f:
            _cache[path] = f.read()
    return _cache[path]


def render_template(name, prompt_dir=None, **values):
    """模板里的占位符：{x} {schema} {strategy} {dimension} {task}"""
    return load_template(name, prompt_dir).format_map(values)
