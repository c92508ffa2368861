import gzip
import math
import hashlib
import json
import os
import re

HEADER_KEY = "__header__"
FORMAT_VERSION = 1

_WS = re.compile(r"\s+")


def normalize_ws(text):
    """trim + 合并连续空白"""
    if text is None:
        return ""
    return _WS.sub(" ", str(text)).strip()


def canonical_dumps(obj):
    """确定性的 JSON 文本（sorted keys，紧凑分隔符，保留 unicode）"""
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def sha256_text(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def sha256_json(obj):
    return sha256_text(canonical_dumps(obj))


def _open(path, mode):
    if str(path).endswith(".gz"):
        return gzip.open(path, mode + "t", encoding="utf-8")
    return open(path, mode, encoding="utf-8")


def make_header(fmt, config=None, **extra):
    header = {"format": fmt, "version": FORMAT_VERSION}
    if config is not None:
        header["config"] = config
    header.update(extra)
    return {HEADER_KEY: header}


def write_jsonl(path, rows, fmt=None, config=None, **header_extra):
    """
    写 JSONL。给了 fmt 时第一行写 header。
    .gz 结尾自动 gzip。
    """
    dirname = os.path.dirname(os.path.abspath(path))
    os.makedirs(dirname, exist_ok=True)
    n = 0
    with _open(path, "w") as f:
        if fmt is not None:
            f.write(canonical_dumps(make_header(fmt, config, **header_extra)) + "\n")
        for row in rows:
            f.write(canonical_dumps(row) + "\n")
            n += 1
    return n


def read_jsonl(path):
    """
    读 JSONL，返回 (header, rows)。没有 header 时 header 为 {}。
    """
    header = {}
    rows = []
    with _open(path, "r") as f:
        for line_num, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if line_num == 1 and isinstance(obj, dict) and HEADER_KEY in obj:
                header = obj[HEADER_KEY]
                continue
            rows.append(obj)
    return header, rows


def read_json(path):
    with _open(path, "r") as f:
        return json.load(f)


def write_json(path, obj, indent=2):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with _open(path, "w") as f:
        json.dump(obj, f, ensure_ascii=False, indent=indent, sort_keys=True)
        f.write("\n")
    return path


def ceil_count(fraction, n):
    """⌈fraction·n⌉，先把浮点误差舍掉（0.1*110 不能变成 12）"""
    return int(math.ceil(round(float(fraction) * n, 9)))


_TOKEN = re.compile(r"[^\W_]+")


def tokenize(text):
    """小写，按空白和标点切分，不做词干和停用词"""
    return _TOKEN.findall((text or "").lower())
