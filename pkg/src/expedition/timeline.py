"""Query-specific monthly profile, burst detection, labels, placements.

The profile mixes two normalized monthly distributions over the pool:
where pool documents were published, and which months their in-text
temporal references point at.  Bursts are maximal runs of months whose
combined mass exceeds mean + burst_k * stddev, labeled with the
headlines of the strongest pool documents published inside the run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .config import DEFAULTS, Params
from .errors import NoMatchesError
from .index import Index
from .months import month_index, month_range
from .ranking import CandidatePool, ScoredDoc


@dataclass(frozen=True)
class Burst:
    start: str
    end: str
    peak: str
    labels: tuple[str, ...] = ()
    reference_driven: bool = False


@dataclass(frozen=True)
class Placement:
    doc_id: str
    rank: int
    month: str


@dataclass
class TimelineProfile:
    months: list[str]
    p_pub: list[float]
    p_ref: list[float]
    p_combined: list[float]
    has_refs: bool = False
    no_data: bool = False
    bursts: list[Burst] = field(default_factory=list)
    placements: list[Placement] = field(default_factory=list)

    def combined_by_month(self) -> dict[str, float]:
        return dict(zip(self.months, self.p_combined))


def temporal_profile(
    pool: CandidatePool, index: Index, alpha: float = 0.5
) -> TimelineProfile:
    """Monthly distributions over the pseudo-relevant pool.

    p_pub counts publications per month; p_ref spreads each temporal
    reference's unit mass uniformly over the months it spans, discards
    mass outside the corpus span, then renormalizes.  The combined
    profile is alpha * p_pub + (1 - alpha) * p_ref, falling back to
    p_pub alone when the pool carries no usable references.
    """
    months = month_range(*index.span)
    if not pool.docs:
        zeros = [0.0] * len(months)
        return TimelineProfile(months, zeros, list(zeros), list(zeros), no_data=True)

    pos = {m: i for i, m in enumerate(months)}
    n = len(pool.docs)
    pub_counts = [0] * len(months)
    ref_raw = [0.0] * len(months)
    for sd in pool.docs:
        doc = index.docs[sd.doc_id]
        pub_counts[pos[doc.month]] += 1
        for ref in doc.temporal_refs:
            covered = month_range(ref.start_month, ref.end_month)
            per_month = 1.0 / len(covered)
            for m in covered:
                if m in pos:
                    ref_raw[pos[m]] += per_month

    p_pub = [c / n for c in pub_counts]
    ref_total = math.fsum(ref_raw)
    has_refs = ref_total > 0.0
    if has_refs:
        p_ref = [x / ref_total for x in ref_raw]
        p_combined = [alpha * a + (1.0 - alpha) * b for a, b in zip(p_pub, p_ref)]
    else:
        p_ref = [0.0] * len(months)
        p_combined = list(p_pub)
    return TimelineProfile(months, p_pub, p_ref, p_combined, has_refs=has_refs)


def detect_bursts(profile: TimelineProfile, burst_k: float = 1.0) -> list[Burst]:
    """Maximal runs of months with combined mass above mean + k * stddev."""
    vals = profile.p_combined
    n = len(vals)
    if n < 2:
        return []
    mean = math.fsum(vals) / n
    var = math.fsum((x - mean) ** 2 for x in vals) / n
    sigma = math.sqrt(var)
    if sigma == 0.0:
        return []
    threshold = mean + burst_k * sigma
    bursts: list[Burst] = []
    run_start: int | None = None
    for i in range(n + 1):
        bursting = i < n and vals[i] > threshold
        if bursting and run_start is None:
            run_start = i
        elif not bursting and run_start is not None:
            peak = run_start
            for j in range(run_start, i):
                if vals[j] > vals[peak]:
                    peak = j
            bursts.append(
                Burst(profile.months[run_start], profile.months[i - 1], profile.months[peak])
            )
            run_start = None
    return bursts


def label_bursts(
    bursts: list[Burst],
    pool: CandidatePool,
    index: Index,
    max_labels: int = 3,
) -> list[Burst]:
    """Label each burst with the headlines of the strongest pool documents
    published inside it; a burst carried only by references gets no
    labels and is flagged reference_driven."""
    labeled = []
    for burst in bursts:
        lo, hi = month_index(burst.start), month_index(burst.end)
        titles = []
        for sd in pool.docs:  # pool order = LM score descending
            if lo <= month_index(index.doc_bucket[sd.doc_id]) <= hi:
                titles.append(index.docs[sd.doc_id].title)
                if len(titles) == max_labels:
                    break
        labeled.append(
            replace(burst, labels=tuple(titles), reference_driven=not titles)
        )
    return labeled


def place_top_docs(
    ranked: list[ScoredDoc], index: Index, k: int = 10
) -> list[Placement]:
    """Publication-month markers for the k best-ranked documents."""
    return [
        Placement(sd.doc_id, sd.rank, index.doc_bucket[sd.doc_id])
        for sd in ranked[:k]
    ]


def profile_payload(profile: TimelineProfile) -> dict:
    """JSON-ready view of a profile, shared by the REST API and the CLI."""
    return {
        "no_data": profile.no_data,
        "has_refs": profile.has_refs,
        "months": [
            {"month": m, "p_pub": pp, "p_ref": pr, "p_combined": pc}
            for m, pp, pr, pc in zip(
                profile.months, profile.p_pub, profile.p_ref, profile.p_combined
            )
        ],
        "bursts": [
            {
                "start": b.start,
                "end": b.end,
                "peak": b.peak,
                "labels": list(b.labels),
                "reference_driven": b.reference_driven,
            }
            for b in profile.bursts
        ],
        "placements": [
            {"doc_id": p.doc_id, "rank": p.rank, "month": p.month}
            for p in profile.placements
        ],
    }


def build_timeline(request, index: Index, params: Params = DEFAULTS) -> TimelineProfile:
    """Full annotated timeline for one query: profile, bursts, placements."""
    from .ranking import make_pool, parse_query, rank
    from .refine import matching_doc_ids

    months = month_range(*index.span)
    empty = TimelineProfile(
        months, [0.0] * len(months), [0.0] * len(months), [0.0] * len(months),
        no_data=True,
    )
    terms = parse_query(request.q)
    if not terms:
        raise ValueError("query has no terms after tokenization")
    eligible = matching_doc_ids(index, request.constraints)
    if eligible is not None and not eligible:
        return empty
    try:
        pool = make_pool(index, terms, eligible, params)
    except NoMatchesError:
        return empty
    profile = temporal_profile(pool, index, alpha=params.alpha)
    if profile.no_data:
        return profile
    bursts = label_bursts(
        detect_bursts(profile, params.burst_k), pool, index, params.burst_labels
    )
    ranked = rank(request.with_k(params.placement_k), index, params)
    profile.bursts = bursts
    profile.placements = place_top_docs(ranked, index, params.placement_k)
    return profile
