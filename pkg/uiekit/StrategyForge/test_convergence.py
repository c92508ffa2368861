import math
import random

import pytest

from .Convergence import (
    cluster_by_paradigm,
    co_occurrence,
    embed_tfidf,
    load_paradigms,
    mean_similarities,
    pick_representatives,
    representative_pool,
    sample_core,
    similarity_matrix,
    tokenize,
)
from .Exceptions import InvalidParadigms
from .Prompts import DEFAULT_PARADIGMS
from .Strategy import OTHER, AnalyticalDimension, Paradigm, Strategy, StrategyCluster

A = Paradigm(1, ("entity", "type"))
B = Paradigm(2, ("event",))


def strat(text, dim=AnalyticalDimension.COGNITIVE):
    return Strategy(text, dim)


def oracle_vectors(texts):
    docs = [tokenize(t) for t in texts]
    vocab = sorted({w for d in docs for w in d})
    n = len(docs)
    df = {w: sum(1 for d in docs if w in d) for w in vocab}
    return [[(d.count(w) / len(d)) * (math.log(n / (1 + df[w])) + 1) for w in vocab] for d in docs]


def oracle_cos(u, v):
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    if nu == 0 or nv == 0:
        return 0.0
    return sum(a * b for a, b in zip(u, v)) / (nu * nv)


def test_tokenize():
    assert tokenize("Check entity-types, and SPANS!") == ["check", "entity", "types", "and", "spans"]
    assert tokenize("") == []


def test_cluster_highest_co_occurrence():
    s = strat("check entity types and spans")
    assert co_occurrence(s.text, A) == 2
    assert co_occurrence(s.text, B) == 0
    (cluster,) = cluster_by_paradigm([s], [A, B])
    assert cluster.paradigm_id == 1
    assert cluster.members[0].paradigm_id == 1


def test_cluster_tie_goes_to_lowest_id():
    (cluster,) = cluster_by_paradigm([strat("find the entity behind each event")], [B, Paradigm(1, ("entity",))])
    assert cluster.paradigm_id == 1


def test_cluster_no_hits_goes_to_other():
    (cluster,) = cluster_by_paradigm([strat("read slowly")], [A, B])
    assert cluster.paradigm_id == OTHER
    assert cluster.is_other


def test_keyword_needs_left_boundary():
    assert co_occurrence("subtype", A) == 0
    assert co_occurrence("prototypes of the entity", A) == 1


def test_cluster_requires_paradigms():
    with pytest.raises(InvalidParadigms):
        cluster_by_paradigm([strat("x")], [])


def test_every_strategy_in_exactly_one_cluster():
    paradigms = load_paradigms(DEFAULT_PARADIGMS)
    rng = random.Random(1)
    words = ["entity", "relation", "event", "verify", "analyst", "read", "slowly", "time", "span", "then"]
    strats = [strat(" ".join(rng.choice(words) for _ in range(rng.randint(1, 6)))) for _ in range(15)]
    clusters = cluster_by_paradigm(strats, paradigms)
    assert sum(len(c) for c in clusters) == 15
    ids = [c.paradigm_id for c in clusters]
    assert len(ids) == len(set(ids))
    assert sorted(m.text for c in clusters for m in c.members) == sorted(s.text for s in strats)


def test_default_paradigms_load():
    paradigms = load_paradigms(DEFAULT_PARADIGMS)
    assert [p.paradigm_id for p in paradigms] == [1, 2, 3, 4, 5]


def test_paradigm_rejects_bad_keywords():
    with pytest.raises(InvalidParadigms):
        Paradigm(1, ())
    with pytest.raises(InvalidParadigms):
        Paradigm(1, ("Entity",))
    with pytest.raises(InvalidParadigms):
        Paradigm(1, ("a", "a"))
    with pytest.raises(InvalidParadigms):
        Paradigm(0, ("a",))


def test_tfidf_identical_and_disjoint():
    sims = similarity_matrix(["find the names", "find the names"])
    assert sims[0, 1] == pytest.approx(1.0)
    sims = similarity_matrix(["alpha beta", "gamma delta"])
    assert sims[0, 1] == 0.0


@pytest.mark.parametrize("texts", [["a b", "a c", "b c"], ["a a b", "a c", "b c c d"]])
def test_tfidf_matches_hand_formula(texts):
    vectors = embed_tfidf(texts)
    expected = oracle_vectors(texts)
    for got, want in zip(vectors, expected):
        assert list(got) == pytest.approx(want, abs=1e-12)
    sims = similarity_matrix(texts)
    for i in range(3):
        for j in range(3):
            if i != j:
                assert abs(sims[i, j] - oracle_cos(expected[i], expected[j])) < 1e-9


def test_tfidf_three_tiny_docs_value():
    sims = similarity_matrix(["a b", "a c", "b c"])
    assert abs(sims[0, 1] - 0.5) < 1e-9


def test_pick_singleton():
    s = strat("only one")
    assert pick_representatives(StrategyCluster(1, [s])) == (s, s)


def test_pick_duplicate_pair():
    d1, d2, u = strat("check the entity spans"), strat("check the entity spans"), strat("check the event triggers")
    unique, generic = pick_representatives(StrategyCluster(1, [d1, d2, u]))
    assert unique is u
    assert generic is d1


def test_pick_all_identical_takes_first():
    members = [strat("same text"), strat("same text"), strat("same text")]
    unique, generic = pick_representatives(StrategyCluster(1, members))
    assert unique is members[0]
    assert generic is members[0]


def test_pick_representatives_brute_force():
    rng = random.Random(4)
    words = ["entity", "span", "type", "check", "event", "trigger", "role", "verify", "time"]
    for _ in range(200):
        members = [strat(" ".join(rng.choice(words) for _ in range(rng.randint(1, 5))))
                   for _ in range(rng.randint(1, 6))]
        unique, generic = pick_representatives(StrategyCluster(1, members))
        if len(members) == 1:
            continue
        vecs = oracle_vectors([m.text for m in members])
        means = []
        for i in range(len(members)):
            others = [oracle_cos(vecs[i], vecs[j]) for j in range(len(members)) if j != i]
            means.append(sum(others) / len(others))
        mu = means[members.index(unique)]
        mg = means[members.index(generic)]
        for m in means:
            assert mu <= m + 1e-9
            assert m <= mg + 1e-9
        assert list(mean_similarities([m.text for m in members])) == pytest.approx(means, abs=1e-9)


def test_representative_pool_dedups():
    c1 = StrategyCluster(1, [strat("entity span check"), strat("entity span check"), strat("time")])
    c2 = StrategyCluster(2, [strat("time")])
    pool = representative_pool([c1, c2])
    assert [p.text for p in pool] == ["time", "entity span check"]


def test_sample_core():
    cands = [strat(f"s{i}") for i in range(8)]
    picked = sample_core(cands, 5, seed=3)
    assert len(picked) == 5
    assert len({p.text for p in picked}) == 5
    assert sample_core(cands, 5, seed=3) == picked
    assert sample_core(cands[:3], 5, seed=3) == cands[:3]
    assert sample_core(cands, 8, seed=1) == cands
