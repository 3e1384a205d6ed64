import math
import random

import pytest

from expedition import index as index_mod
from expedition.config import DEFAULTS
from expedition.corpus import Corpus, IngestReport
from expedition.errors import NoMatchesError
from expedition.ranking import (
    CandidatePool,
    QueryRequest,
    RetrievalModel,
    ScoredDoc,
    aspect_priors,
    diversify_historical,
    diversify_temporal,
    diversify_topical,
    lm_scores,
    make_pool,
    parse_query,
    rank,
    score_temporal,
    score_textual,
    total_matching,
)
from helpers import make_doc, random_index
from oracles import (
    dirichlet_scores,
    greedy_temporal,
    historical_compounds,
    ia_select,
    rel01_normalize,
)


def corpus_of(docs):
    buckets = [d.month for d in docs]
    return Corpus(docs, (min(buckets), max(buckets)), IngestReport())


def fake_pool(rel: dict[str, float], lm: dict[str, float] | None = None) -> CandidatePool:
    """Pool with prescribed rel01 values (lm defaults to rel01)."""
    lm = lm or dict(rel)
    order = sorted(rel, key=lambda d: (-lm[d], d))
    docs = [ScoredDoc(d, lm[d], r) for r, d in enumerate(order, 1)]
    return CandidatePool(terms=["q"], docs=docs, lm=dict(lm), rel01=dict(rel))


# --- textual -------------------------------------------------------------

def test_textual_police_ranking(tiny6_index):
    ranked = score_textual(tiny6_index, ["police"])
    position = {sd.doc_id: sd.rank for sd in ranked}
    for hit in ("d1", "d3", "d4"):
        for miss in ("d2", "d5", "d6"):
            assert position[hit] < position[miss]


def test_unseen_terms_signal(tiny6_index):
    with pytest.raises(NoMatchesError) as err:
        score_textual(tiny6_index, ["zzzz"])
    assert err.value.reason == "unseen_terms"


def test_smoothing_prefers_shorter_doc_for_absent_term():
    docs = [
        make_doc("a", ["x"] * 4, "1990-01", title="t"),
        make_doc("b", ["x"] * 9, "1990-01", title="t"),
        make_doc("c", ["needle", "x"], "1990-02", title="t"),
    ]
    idx = index_mod.build(corpus_of(docs))
    ranked = score_textual(idx, ["needle"])
    assert [sd.doc_id for sd in ranked] == ["c", "a", "b"]


def test_tie_breaks_lexicographic():
    docs = [
        make_doc("b", ["x", "y"], "1990-01", title="t"),
        make_doc("a", ["x", "y"], "1990-01", title="t"),
    ]
    idx = index_mod.build(corpus_of(docs))
    assert [sd.doc_id for sd in score_textual(idx, ["x"])] == ["a", "b"]


def test_lm_agrees_with_brute_force():
    rng = random.Random(17)
    for _ in range(10):
        idx = random_index(rng, rng.randint(2, 10), ["1990-01", "1990-02"])
        texts = {d: idx.docs[d].full_text() for d in idx.doc_ids}
        query = " ".join(rng.choices(["w00", "w01", "w02", "w03"], k=2))
        expected = dirichlet_scores(texts, query)
        got = lm_scores(idx, parse_query(query))
        for d in idx.doc_ids:
            assert got[d] == pytest.approx(expected[d], rel=1e-9)


def test_pool_rel01_bounds(tiny6_index):
    pool = make_pool(tiny6_index, ["police"])
    values = [pool.rel01[sd.doc_id] for sd in pool.docs]
    assert values[0] == 1.0
    assert values[-1] == 0.0
    assert all(0.0 <= v <= 1.0 for v in values)


def test_single_doc_pool_rel01_is_one():
    idx = index_mod.build(corpus_of([make_doc("only", ["x"], "1990-01")]))
    pool = make_pool(idx, ["x"])
    assert pool.rel01 == {"only": 1.0}


def test_pool_caps_at_pool_size(tiny6_index):
    pool = make_pool(tiny6_index, ["police"], params=DEFAULTS.replace(pool_size=3))
    assert len(pool.docs) == 3


# --- temporal relevance --------------------------------------------------

def test_temporal_wtc_puts_event_months_on_top(tiny6_index):
    ranked = score_temporal(tiny6_index, parse_query("world trade center"))
    assert {ranked[0].doc_id, ranked[1].doc_id} == {"d5", "d6"}


def test_uniform_profile_preserves_textual_order():
    docs = [
        make_doc(f"d{i}", ["x"] * (i + 2) + ["hit"] * (5 - i), f"1990-{i + 1:02d}")
        for i in range(4)
    ]
    idx = index_mod.build(corpus_of(docs))
    textual = [sd.doc_id for sd in score_textual(idx, ["hit"])]
    temporal = [sd.doc_id for sd in score_temporal(idx, ["hit"])]
    assert temporal == textual


def test_temporal_without_refs_well_defined():
    rng = random.Random(3)
    idx = random_index(rng, 8, ["1990-01", "1990-02", "1990-03"])
    ranked = score_temporal(idx, ["w00"])
    assert ranked
    assert all(sd.score >= 0 for sd in ranked)


# --- temporal diversification --------------------------------------------

def test_greedy_decay_hand_example(tiny6_index):
    docs = [
        make_doc("a", ["x"], "1990-01"),
        make_doc("b", ["x"], "1990-01"),
        make_doc("c", ["x"], "1990-02"),
        make_doc("d", ["x"], "1990-03"),
    ]
    idx = index_mod.build(corpus_of(docs))
    pool = fake_pool({"a": 1.0, "b": 0.9, "c": 0.5, "d": 0.4})
    picked = diversify_temporal(pool, idx, k=3)
    # b decays to 0.9 / e ~ 0.331, below both 0.5 and 0.4
    assert [sd.doc_id for sd in picked] == ["a", "c", "d"]


def test_distinct_buckets_mean_relevance_order():
    docs = [make_doc(d, ["x"], f"199{i}-01") for i, d in enumerate("abcd")]
    idx = index_mod.build(corpus_of(docs))
    pool = fake_pool({"a": 0.8, "b": 1.0, "c": 0.6, "d": 0.9})
    picked = diversify_temporal(pool, idx, k=4)
    assert [sd.doc_id for sd in picked] == ["b", "d", "a", "c"]


def test_gamma_zero_means_relevance_order():
    docs = [make_doc(d, ["x"], "1990-01") for d in "abc"]
    idx = index_mod.build(corpus_of(docs))
    pool = fake_pool({"a": 0.5, "b": 1.0, "c": 0.75})
    picked = diversify_temporal(pool, idx, k=3, gamma=0.0)
    assert [sd.doc_id for sd in picked] == ["b", "c", "a"]


def test_wtc_scenario_covers_both_events(tiny6_index):
    pool = make_pool(tiny6_index, parse_query("world trade center"))
    picked = diversify_temporal(pool, tiny6_index, k=2)
    months = {tiny6_index.doc_bucket[sd.doc_id] for sd in picked}
    assert months == {"1993-02", "2001-09"}
    assert {sd.doc_id for sd in picked} == {"d5", "d6"}


# --- topical diversification ---------------------------------------------

def _entity_fixture():
    docs = [
        make_doc("p", ["x"], "1990-01", entities=["E:X"]),
        make_doc("q", ["x"], "1990-01", entities=["E:X"]),
        make_doc("r", ["x"], "1990-01", entities=["E:Y"]),
    ]
    return index_mod.build(corpus_of(docs))


def test_ia_select_hand_example():
    idx = _entity_fixture()
    pool = fake_pool({"p": 1.0, "q": 0.9, "r": 0.6})
    picked = diversify_topical(pool, idx, [("E:X", 0.5), ("E:Y", 0.5)], k=2)
    # after p, U(E:X) = 0 so g(q) = 0.009 < g(r) = 0.305
    assert [sd.doc_id for sd in picked] == ["p", "r"]


def test_single_aspect_cannot_reorder():
    docs = [make_doc(d, ["x"], "1990-01", entities=["E:X"]) for d in "abc"]
    idx = index_mod.build(corpus_of(docs))
    pool = fake_pool({"a": 0.7, "b": 1.0, "c": 0.9})
    picked = diversify_topical(pool, idx, [("E:X", 1.0)], k=3)
    assert [sd.doc_id for sd in picked] == ["b", "c", "a"]


def test_double_coverage_beats_single():
    docs = [
        make_doc("both", ["x"], "1990-01", entities=["E:X", "E:Y"]),
        make_doc("alone", ["x"], "1990-01", entities=["E:X"]),
    ]
    idx = index_mod.build(corpus_of(docs))
    pool = fake_pool({"both": 1.0, "alone": 1.0})
    picked = diversify_topical(pool, idx, [("E:X", 0.5), ("E:Y", 0.5)], k=1)
    assert picked[0].doc_id == "both"


def test_empty_aspects_degrade_to_relevance_order():
    idx = _entity_fixture()
    pool = fake_pool({"p": 0.3, "q": 1.0, "r": 0.6})
    picked = diversify_topical(pool, idx, [], k=3)
    assert [sd.doc_id for sd in picked] == ["q", "r", "p"]


# --- historical diversification -------------------------------------------

def test_full_compound_coverage():
    docs = [
        make_doc("d1", ["x"], "1990-01", entities=["E:A"]),
        make_doc("d2", ["x"], "1990-01", entities=["E:B"]),
        make_doc("d3", ["x"], "1990-02", entities=["E:A"]),
        make_doc("d4", ["x"], "1990-02", entities=["E:B"]),
    ]
    idx = index_mod.build(corpus_of(docs))
    pool = fake_pool({d: 1.0 for d in ("d1", "d2", "d3", "d4")})
    picked = diversify_historical(
        pool, idx, [("E:A", 0.5), ("E:B", 0.5)], {"1990-01": 0.5, "1990-02": 0.5}, k=4
    )
    assert {sd.doc_id for sd in picked} == {"d1", "d2", "d3", "d4"}


def test_single_bucket_collapses_to_topical():
    rng = random.Random(11)
    for _ in range(10):
        idx = random_index(rng, rng.randint(2, 10), ["1990-01"])
        rel = {d: round(rng.random(), 3) for d in idx.doc_ids}
        top = max(rel.values()) or 1.0
        rel = {d: v / top for d, v in rel.items()}
        pool = fake_pool(rel)
        aspects = [("E:a", 0.4), ("E:b", 0.3), ("E:c", 0.3)]
        a = diversify_topical(pool, idx, aspects, k=len(rel))
        b = diversify_historical(pool, idx, aspects, {"1990-01": 1.0}, k=len(rel))
        assert [sd.doc_id for sd in a] == [sd.doc_id for sd in b]


def test_single_entity_one_doc_per_strong_bucket_first():
    docs = [
        make_doc("d1", ["x"], "1990-01", entities=["E:E"]),
        make_doc("d2", ["x"], "1990-01", entities=["E:E"]),
        make_doc("d3", ["x"], "1990-02", entities=["E:E"]),
        make_doc("d4", ["x"], "1990-03", entities=["E:E"]),
    ]
    idx = index_mod.build(corpus_of(docs))
    pool = fake_pool({"d1": 1.0, "d2": 0.9, "d3": 0.8, "d4": 0.7})
    picked = diversify_historical(
        pool, idx, [("E:E", 1.0)], {"1990-01": 0.5, "1990-02": 0.3, "1990-03": 0.2}, k=4
    )
    assert [sd.doc_id for sd in picked] == ["d1", "d3", "d4", "d2"]


# --- rank dispatch ---------------------------------------------------------

def test_rank_contract(tiny6_index):
    ranked = rank(QueryRequest(q="police new york"), tiny6_index)
    assert ranked
    assert [sd.rank for sd in ranked] == list(range(1, len(ranked) + 1))


def test_rank_deterministic(tiny6_index):
    a = rank(QueryRequest(q="police new york", model=RetrievalModel.HIST_DIV), tiny6_index)
    b = rank(QueryRequest(q="police new york", model=RetrievalModel.HIST_DIV), tiny6_index)
    assert a == b


def test_topical_rank_spans_aspects(tiny6_index):
    ranked = rank(
        QueryRequest(q="new york", model=RetrievalModel.TOPICAL_DIV, k=6), tiny6_index
    )
    aspects = set()
    for sd in ranked:
        aspects |= tiny6_index.doc_entities[sd.doc_id]
    assert len(aspects) >= 3


def test_aspect_priors_normalized(tiny6_index):
    pool = make_pool(tiny6_index, ["new", "york"])
    priors = aspect_priors(pool, tiny6_index)
    assert priors
    assert math.fsum(p for _, p in priors) == pytest.approx(1.0)
    assert priors == sorted(priors, key=lambda kv: (-kv[1], kv[0]))


def test_total_matching(tiny6_index):
    assert total_matching(tiny6_index, ["police"]) == 3
    assert total_matching(tiny6_index, ["police", "zzzz"]) == 3
    assert total_matching(tiny6_index, ["zzzz"]) == 0


# --- cross-model properties -------------------------------------------------

def _random_pool_index(rng):
    months = [f"1990-{m:02d}" for m in range(1, rng.randint(2, 7))]
    idx = random_index(rng, rng.randint(2, 30), months)
    lm = {d: rng.uniform(-10, -1) for d in idx.doc_ids}
    rel = rel01_normalize(lm)
    order = sorted(lm, key=lambda d: (-lm[d], d))
    docs = [ScoredDoc(d, lm[d], r) for r, d in enumerate(order, 1)]
    return idx, CandidatePool(["q"], docs, lm, rel)


def test_greedy_matches_oracle_sample():
    rng = random.Random(23)
    for _ in range(30):
        idx, pool = _random_pool_index(rng)
        k = rng.randint(1, len(pool.docs))
        got = [sd.doc_id for sd in diversify_temporal(pool, idx, k)]
        want = greedy_temporal(pool.rel01, idx.doc_bucket, pool.lm, k)
        assert got == want

        aspects = [("E:a", 0.5), ("E:b", 0.3), ("E:c", 0.2)]
        got_t = [sd.doc_id for sd in diversify_topical(pool, idx, aspects, k)]
        covers = {
            d: frozenset(e for e in idx.doc_entities[d] if e in dict(aspects))
            for d in pool.rel01
        }
        want_t = ia_select(pool.rel01, covers, dict(aspects), pool.lm, k)
        assert got_t == want_t


def test_rel01_scaling_keeps_temporal_orders():
    rng = random.Random(29)
    for _ in range(15):
        idx, pool = _random_pool_index(rng)
        c = rng.uniform(0.1, 0.9)
        scaled = CandidatePool(
            pool.terms, pool.docs, pool.lm,
            {d: v * c for d, v in pool.rel01.items()},
        )
        k = len(pool.docs)
        assert [sd.doc_id for sd in diversify_temporal(pool, idx, k)] == [
            sd.doc_id for sd in diversify_temporal(scaled, idx, k)
        ]


def test_rel01_scaling_keeps_first_ia_pick():
    rng = random.Random(31)
    aspects = [("E:a", 0.6), ("E:b", 0.4)]
    for _ in range(15):
        idx, pool = _random_pool_index(rng)
        c = rng.uniform(0.1, 0.9)
        scaled = CandidatePool(
            pool.terms, pool.docs, pool.lm,
            {d: v * c for d, v in pool.rel01.items()},
        )
        a = diversify_topical(pool, idx, aspects, k=1)[0].doc_id
        b = diversify_topical(scaled, idx, aspects, k=1)[0].doc_id
        assert a == b


def test_ia_utility_never_increases():
    rng = random.Random(37)
    for _ in range(20):
        idx, pool = _random_pool_index(rng)
        priors = {"E:a": 0.5, "E:b": 0.3, "E:c": 0.2}
        covers = {d: idx.doc_entities[d] & priors.keys() for d in pool.rel01}
        utility = dict(priors)
        remaining = set(pool.rel01)
        while remaining:
            gains = {
                d: pool.rel01[d]
                * (sum(utility[a] for a in sorted(covers[d])) + 0.01)
                for d in remaining
            }
            best = min(gains, key=lambda d: (-gains[d], -pool.lm[d], d))
            remaining.remove(best)
            before = dict(utility)
            for a in covers[best]:
                utility[a] *= 1.0 - pool.rel01[best]
            assert all(utility[a] <= before[a] + 1e-15 for a in utility)


def test_historical_compound_priors_match_oracle(tiny6_index):
    pool = make_pool(tiny6_index, ["new", "york"])
    aspects = aspect_priors(pool, tiny6_index)
    from expedition.timeline import temporal_profile

    profile = temporal_profile(pool, tiny6_index)
    dist = profile.combined_by_month()
    want = historical_compounds(aspects, dist, DEFAULTS.top_entities, DEFAULTS.top_buckets)
    got = diversify_historical(pool, tiny6_index, aspects, dist, k=6)
    covers_by_doc = {
        d: {(e, tiny6_index.doc_bucket[d]) for e in tiny6_index.doc_entities[d]
            if (e, tiny6_index.doc_bucket[d]) in want}
        for d in pool.rel01
    }
    oracle = ia_select(
        pool.rel01,
        {d: frozenset(c) for d, c in covers_by_doc.items()},
        want,
        pool.lm,
        6,
    )
    assert [sd.doc_id for sd in got] == oracle
