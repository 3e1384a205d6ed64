"""Per-article salient entities and the query-time selector list.

Salience is a transparent heuristic: a title mention, an early first
mention, and relative in-document frequency each contribute, and an
entity is salient once the sum reaches the threshold.  The query-time
selector list counts, over the top retrieved documents, how many
articles each entity is salient in, and keeps the most frequent ones.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .config import DEFAULTS, Params
from .corpus import Document
from .index import Index
from .ranking import ScoredDoc


@dataclass(frozen=True)
class SalientEntity:
    entity_id: str
    salience_score: float
    doc_frequency: int = 0


def article_salience(doc: Document, params: Params = DEFAULTS) -> list[SalientEntity]:
    """Entities central to one article, strongest first.

    score = title_weight * [mentioned in title]
          + early_weight * [first mention within the leading text fraction]
          + mention_count / max mention count in the document
    """
    if not doc.entity_mentions:
        return []
    freq: Counter = Counter()
    earliest: dict[str, int] = {}
    titled: set[str] = set()
    for m in doc.entity_mentions:
        freq[m.entity_id] += 1
        if m.entity_id not in earliest or m.char_start < earliest[m.entity_id]:
            earliest[m.entity_id] = m.char_start
        if m.in_title:
            titled.add(m.entity_id)
    max_freq = max(freq.values())
    early_cutoff = params.salience_early_frac * len(doc.full_text())

    scored = []
    for entity_id, count in freq.items():
        score = count / max_freq
        if entity_id in titled:
            score += params.salience_title_weight
        if earliest[entity_id] < early_cutoff:
            score += params.salience_early_weight
        if score >= params.salience_threshold:
            scored.append(SalientEntity(entity_id, score))
    scored.sort(key=lambda s: (-s.salience_score, s.entity_id))
    return scored


def query_entity_selectors(
    ranked: list[ScoredDoc], index: Index, params: Params = DEFAULTS
) -> list[SalientEntity]:
    """Selector entities for a result list: salience document frequency
    over the leading retrieved documents, most frequent first."""
    df: Counter = Counter()
    best_score: dict[str, float] = {}
    for sd in ranked[: params.selector_docs]:
        for salient in article_salience(index.docs[sd.doc_id], params):
            df[salient.entity_id] += 1
            best_score[salient.entity_id] = max(
                best_score.get(salient.entity_id, 0.0), salient.salience_score
            )
    top = sorted(df.items(), key=lambda kv: (-kv[1], kv[0]))[: params.selector_top]
    return [
        SalientEntity(entity_id, best_score[entity_id], doc_frequency=count)
        for entity_id, count in top
    ]
