"""
收敛阶段：按关键词范式聚类 -> TF-IDF 余弦找每簇的代表（最独特 / 最通用）-> 均匀抽 P 个。

分词：小写，按空白和标点切分，不做词干和停用词。
TF-IDF：tf = 词频 / 文档长度，idf = ln(N / (1 + df)) + 1
"""
import random
import re

import numpy as np
from ncatbot.utils.logger import get_log
from sklearn.feature_extraction.text import CountVectorizer
from sklearn.metrics.pairwise import cosine_similarity

from ..Base.utils import read_json, tokenize
from .Exceptions import InvalidParadigms
from .Strategy import OTHER, Paradigm, StrategyCluster

log = get_log()


def load_paradigms(path):
    """[{id, keywords:[...]}]"""
    raw = read_json(path)
    if not isinstance(raw, list) or not raw:
        raise InvalidParadigms(f"范式文件必须是非空数组: {path}")
    paradigms = [Paradigm.from_json(p) for p in raw]
    ids = [p.paradigm_id for p in paradigms]
    if len(set(ids)) != len(ids):
        raise InvalidParadigms(f"范式 id 重复: {ids}")
    return sorted(paradigms, key=lambda p: p.paradigm_id)


def _keyword_pattern(keyword):
    # 只要求左侧是词边界，types 也算命中 type
    return re.compile(r"(?<![^\W_])" + re.escape(keyword))


def co_occurrence(text, paradigm):
    lowered = (text or "").lower()
    return sum(1 for k in paradigm.keywords if _keyword_pattern(k).search(lowered))


def assign_paradigm(text, paradigms):
    """Returns: (paradigm_id, score)；全部为 0 时归入 OTHER"""
    best_id, best = OTHER, 0
    for p in sorted(paradigms, key=lambda p: p.paradigm_id):
        score = co_occurrence(text, p)
        if score > best:
            best_id, best = p.paradigm_id, score
    return best_id, best


def cluster_by_paradigm(strats, paradigms):
    """
    每个 strategy 恰好进一个簇；簇按 paradigm id 排序，OTHER 排最后，空簇不返回
    """
    if not paradigms:
        raise InvalidParadigms("至少需要一个范式")
    clusters = {}
    for strat in strats:
        pid, _ = assign_paradigm(strat.text, paradigms)
        clusters.setdefault(pid, StrategyCluster(pid)).members.append(strat.with_paradigm(pid))
    order = sorted(clusters, key=lambda pid: (pid == OTHER, pid))
    return [clusters[pid] for pid in order]


def embed_tfidf(texts):
    """
    Returns:
        np.ndarray (len(texts), |vocab|)，所有向量共用一个按字母序的词表
    """
    texts = list(texts)
    if not texts:
        raise ValueError("embed_tfidf 至少需要一段文本")
    vectorizer = CountVectorizer(analyzer=tokenize)
    try:
        counts = vectorizer.fit_transform(texts).toarray().astype(float)
    except ValueError:
        # 全部文本都没有 token
        return np.zeros((len(texts), 0))
    lengths = counts.sum(axis=1, keepdims=True)
    tf = np.divide(counts, lengths, out=np.zeros_like(counts), where=lengths > 0)
    df = (counts > 0).sum(axis=0)
    idf = np.log(len(texts) / (1.0 + df)) + 1.0
    return tf * idf


def similarity_matrix(texts):
    vectors = embed_tfidf(texts)
    if vectors.shape[1] == 0:
        return np.zeros((len(vectors), len(vectors)))
    return cosine_similarity(vectors)


def mean_similarities(texts):
    """每个成员到其他成员的平均余弦"""
    n = len(texts)
    if n < 2:
        return np.zeros(n)
    sims = similarity_matrix(texts)
    np.fill_diagonal(sims, 0.0)
    # 舍掉浮点尾差，保证完全相同的成员并列时取最早插入的
    return np.round(sims.sum(axis=1) / (n - 1), 12)


def pick_representatives(cluster):
    """
    Returns:
        (unique, generic)：平均相似度最低 / 最高的成员，并列取插入顺序最早的
    """
    members = list(cluster.members if isinstance(cluster, StrategyCluster) else cluster)
    if not members:
        raise ValueError("空簇没有代表")
    if len(members) == 1:
        return members[0], members[0]
    means = mean_similarities([m.text for m in members])
    return members[int(np.argmin(means))], members[int(np.argmax(means))]


def representative_pool(clusters):
    """每簇 2 个代表，按文本去重"""
    pool = []
    seen = set()
    for cluster in clusters:
        for strat in pick_representatives(cluster):
            if strat.text not in seen:
                seen.add(strat.text)
                pool.append(strat)
    return pool


def sample_core(candidates, p, seed=0):
    """均匀、不放回地抽 p 个；候选不足 p 个时全部返回"""
    candidates = list(candidates)
    if not candidates:
        raise ValueError("没有候选 strategy")
    if len(candidates) <= p:
        if len(candidates) < p:
            log.warning(f"候选 strategy 只有 {len(candidates)} 个，少于 P={p}")
        return candidates
    return random.Random(seed).sample(candidates, p)
