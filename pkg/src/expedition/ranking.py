"""The five selectable retrieval models plus shared pool machinery.

Textual relevance is a Dirichlet-smoothed unigram language model.
Temporal relevance multiplies textual relevance by the query's monthly
importance profile.  The three diversity models are greedy selectors
over the textual candidate pool: exponential decay over already-covered
months (temporal), IA-Select over entity aspects (topical), and
IA-Select over (entity, month) compound aspects (historical).

Every model is a pure function of (index, request): ties are always
broken by higher textual language-model score, then lexicographic
doc_id, so rankings are fully deterministic.
"""

from __future__ import annotations

import dataclasses
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum

from .config import DEFAULTS, Params
from .errors import NoMatchesError
from .index import Index, tokenize
from .refine import Constraints, matching_doc_ids

TEMPORAL_EPS = 1e-6


class RetrievalModel(str, Enum):
    TEXTUAL = "TEXTUAL"
    TEMPORAL = "TEMPORAL"
    TEMPORAL_DIV = "TEMPORAL_DIV"
    TOPICAL_DIV = "TOPICAL_DIV"
    HIST_DIV = "HIST_DIV"

    @classmethod
    def parse(cls, name: str) -> "RetrievalModel":
        try:
            return cls(name.upper())
        except ValueError:
            raise ValueError(f"unknown retrieval model: {name!r}") from None


@dataclass(frozen=True)
class ScoredDoc:
    doc_id: str
    score: float
    rank: int


@dataclass(frozen=True)
class QueryRequest:
    q: str
    model: RetrievalModel = RetrievalModel.TEXTUAL
    constraints: Constraints | None = None
    prev: tuple[str, ...] = ()
    k: int = 50

    def with_k(self, k: int) -> "QueryRequest":
        return dataclasses.replace(self, k=k)


@dataclass
class CandidatePool:
    """Top pool_size documents by textual LM score, pseudo-relevant set.

    docs are ordered by (score desc, doc_id asc); rel01 holds min-max
    normalized scores (a single-doc or all-tied pool normalizes to 1.0).
    """

    terms: list[str]
    docs: list[ScoredDoc]
    lm: dict[str, float]
    rel01: dict[str, float]

    def doc_ids(self) -> list[str]:
        return [sd.doc_id for sd in self.docs]


def parse_query(q: str) -> list[str]:
    return tokenize(q)


def _known_terms(index: Index, terms: list[str]) -> list[str]:
    """Query tokens present in the collection, multiplicity preserved.

    Unseen terms are dropped (their smoothed probability is zero
    everywhere); a query made only of unseen terms cannot rank anything.
    """
    if not terms:
        raise ValueError("query has no terms after tokenization")
    kept = [t for t in terms if index.collection_tf.get(t, 0) > 0]
    if not kept:
        raise NoMatchesError("unseen_terms", "no query term occurs in the collection")
    return kept


def lm_scores(
    index: Index,
    terms: list[str],
    eligible: list[str] | None = None,
    params: Params = DEFAULTS,
) -> dict[str, float]:
    """Dirichlet-smoothed query log-likelihood for every eligible document."""
    kept = _known_terms(index, terms)
    mu = params.mu
    clen = index.collection_len
    weighted = Counter(kept)
    term_stats = [
        (mult, mu * index.collection_tf[t] / clen, index.postings.get(t, {}))
        for t, mult in weighted.items()
    ]
    doc_ids = index.doc_ids if eligible is None else eligible
    scores: dict[str, float] = {}
    for doc_id in doc_ids:
        denom = index.doc_len[doc_id] + mu
        score = 0.0
        for mult, mu_p, posting in term_stats:
            score += mult * math.log((posting.get(doc_id, 0) + mu_p) / denom)
        scores[doc_id] = score
    return scores


def lm_score_one(
    index: Index, terms: list[str], doc_id: str, params: Params = DEFAULTS
) -> float:
    return lm_scores(index, terms, [doc_id], params)[doc_id]


def make_pool(
    index: Index,
    terms: list[str],
    eligible: list[str] | None = None,
    params: Params = DEFAULTS,
) -> CandidatePool:
    scores = lm_scores(index, terms, eligible, params)
    ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))[: params.pool_size]
    docs = [ScoredDoc(d, s, r) for r, (d, s) in enumerate(ordered, 1)]
    if not docs:
        return CandidatePool(terms, [], {}, {})
    hi, lo = docs[0].score, docs[-1].score
    if hi == lo:
        rel01 = {sd.doc_id: 1.0 for sd in docs}
    else:
        rel01 = {sd.doc_id: (sd.score - lo) / (hi - lo) for sd in docs}
    return CandidatePool(terms, docs, {sd.doc_id: sd.score for sd in docs}, rel01)


def score_textual(
    index: Index,
    terms: list[str],
    eligible: list[str] | None = None,
    params: Params = DEFAULTS,
) -> list[ScoredDoc]:
    """Ranked pool by query log-likelihood."""
    return make_pool(index, terms, eligible, params).docs


def score_temporal(
    index: Index,
    terms: list[str],
    eligible: list[str] | None = None,
    params: Params = DEFAULTS,
) -> list[ScoredDoc]:
    """Textual relevance weighted by the query's monthly importance."""
    from .timeline import temporal_profile

    pool = make_pool(index, terms, eligible, params)
    profile = temporal_profile(pool, index, alpha=params.alpha)
    mass = dict(zip(profile.months, profile.p_combined))
    rescored = [
        (sd.doc_id, pool.rel01[sd.doc_id] * (mass.get(index.doc_bucket[sd.doc_id], 0.0) + TEMPORAL_EPS))
        for sd in pool.docs
    ]
    rescored.sort(key=lambda kv: (-kv[1], -pool.lm[kv[0]], kv[0]))
    return [ScoredDoc(d, s, r) for r, (d, s) in enumerate(rescored, 1)]


def diversify_temporal(
    pool: CandidatePool, index: Index, k: int, gamma: float = 1.0
) -> list[ScoredDoc]:
    """Greedy pick of relevant documents from still-uncovered months.

    Each step selects argmax rel01(d) * exp(-gamma * c(month(d))) where c
    counts already-selected documents in that month.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    remaining = list(pool.docs)  # pool order realizes the tie-break rule
    covered: Counter = Counter()
    out: list[ScoredDoc] = []
    while remaining and len(out) < k:
        best_i, best_v = 0, -math.inf
        for i, sd in enumerate(remaining):
            v = pool.rel01[sd.doc_id] * math.exp(-gamma * covered[index.doc_bucket[sd.doc_id]])
            if v > best_v:
                best_i, best_v = i, v
        chosen = remaining.pop(best_i)
        covered[index.doc_bucket[chosen.doc_id]] += 1
        out.append(ScoredDoc(chosen.doc_id, best_v, len(out) + 1))
    return out


def _ia_select(
    pool: CandidatePool,
    priors: dict,
    covers: dict[str, tuple],
    k: int,
    eta: float,
) -> list[ScoredDoc]:
    """IA-Select greedy loop shared by topical and historical diversity.

    covers maps doc_id to the aspects it can satisfy; satisfying an
    aspect with strength rel01(d) decays its remaining weight by
    (1 - rel01(d)).  The eta * rel01 floor keeps aspect-free documents
    selectable once aspects are exhausted.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    utility = dict(priors)
    remaining = list(pool.docs)
    out: list[ScoredDoc] = []
    while remaining and len(out) < k:
        best_i, best_g = 0, -math.inf
        for i, sd in enumerate(remaining):
            rel = pool.rel01[sd.doc_id]
            g = rel * (math.fsum(utility[a] for a in covers[sd.doc_id]) + eta)
            if g > best_g:
                best_i, best_g = i, g
        chosen = remaining.pop(best_i)
        rel = pool.rel01[chosen.doc_id]
        for a in covers[chosen.doc_id]:
            utility[a] *= 1.0 - rel
        out.append(ScoredDoc(chosen.doc_id, best_g, len(out) + 1))
    return out


def diversify_topical(
    pool: CandidatePool,
    index: Index,
    aspects: list[tuple[str, float]],
    k: int,
    eta: float = 0.01,
) -> list[ScoredDoc]:
    """IA-Select with document entities as intent aspects."""
    priors = dict(aspects)
    covers = {
        sd.doc_id: tuple(sorted(index.doc_entities[sd.doc_id] & priors.keys()))
        for sd in pool.docs
    }
    return _ia_select(pool, priors, covers, k, eta)


def diversify_historical(
    pool: CandidatePool,
    index: Index,
    aspects: list[tuple[str, float]],
    time_dist: dict[str, float],
    k: int,
    params: Params = DEFAULTS,
) -> list[ScoredDoc]:
    """IA-Select over (entity, month) compound aspects.

    Compounds pair the top entity aspects with the highest-mass months;
    a document covers (e, b) only when it mentions e and was published
    in b, so the greedy jointly spreads over entities and periods.
    """
    top_entities = sorted(aspects, key=lambda kv: (-kv[1], kv[0]))[: params.top_entities]
    months = sorted(
        ((b, w) for b, w in time_dist.items() if w > 0),
        key=lambda kv: (-kv[1], kv[0]),
    )[: params.top_buckets]
    raw = {
        (e, b): pe * wb
        for e, pe in top_entities
        for b, wb in months
    }
    total = math.fsum(raw.values())
    priors = {z: w / total for z, w in raw.items()} if total > 0 else {}
    covers = {}
    for sd in pool.docs:
        b = index.doc_bucket[sd.doc_id]
        covers[sd.doc_id] = tuple(
            (e, b) for e in sorted(index.doc_entities[sd.doc_id]) if (e, b) in priors
        )
    return _ia_select(pool, priors, covers, k, params.eta)


def aspect_priors(
    pool: CandidatePool, index: Index, n_docs: int = 100
) -> list[tuple[str, float]]:
    """Entity aspect priors: document frequency over the pool's top docs."""
    df: Counter = Counter()
    for sd in pool.docs[:n_docs]:
        for e in index.doc_entities[sd.doc_id]:
            df[e] += 1
    total = sum(df.values())
    if not total:
        return []
    return sorted(
        ((e, c / total) for e, c in df.items()), key=lambda kv: (-kv[1], kv[0])
    )


def rank(request: QueryRequest, index: Index, params: Params = DEFAULTS) -> list[ScoredDoc]:
    """Dispatch to the requested model and return the top-k ranked list."""
    terms = parse_query(request.q)
    if not terms:
        raise ValueError("query has no terms after tokenization")
    eligible = matching_doc_ids(index, request.constraints)
    if eligible is not None and not eligible:
        raise NoMatchesError("no_constraint_matches", "no document satisfies the constraints")

    model, k = request.model, request.k
    if model is RetrievalModel.TEXTUAL:
        ranked = score_textual(index, terms, eligible, params)[:k]
    elif model is RetrievalModel.TEMPORAL:
        ranked = score_temporal(index, terms, eligible, params)[:k]
    else:
        pool = make_pool(index, terms, eligible, params)
        if model is RetrievalModel.TEMPORAL_DIV:
            ranked = diversify_temporal(pool, index, k, params.gamma)
        elif model is RetrievalModel.TOPICAL_DIV:
            aspects = aspect_priors(pool, index, params.aspect_docs)
            ranked = diversify_topical(pool, index, aspects, k, params.eta)
        elif model is RetrievalModel.HIST_DIV:
            from .timeline import temporal_profile

            aspects = aspect_priors(pool, index, params.aspect_docs)
            profile = temporal_profile(pool, index, alpha=params.alpha)
            time_dist = dict(zip(profile.months, profile.p_combined))
            ranked = diversify_historical(pool, index, aspects, time_dist, k, params)
        else:  # pragma: no cover
            raise ValueError(f"unknown retrieval model: {model!r}")
    return [ScoredDoc(sd.doc_id, sd.score, r) for r, sd in enumerate(ranked[:k], 1)]


def total_matching(
    index: Index, terms: list[str], constraints: Constraints | None = None
) -> int:
    """Documents satisfying the constraints that contain >= 1 query term."""
    try:
        kept = _known_terms(index, terms)
    except NoMatchesError:
        return 0
    hit: set[str] = set()
    for t in set(kept):
        hit.update(index.postings.get(t, ()))
    if constraints:
        from .refine import matches

        hit = {d for d in hit if matches(index, d, constraints)}
    return len(hit)
