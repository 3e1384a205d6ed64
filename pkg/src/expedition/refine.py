"""Time/entity/type selector semantics.

Selectors are not local filters: applying one issues a new constrained
query whose result list pins the surviving previous results on top,
followed by further matching documents in model order.  Entity
constraints are conjunctive (each click narrows), article types are
disjunctive (a category toggle), and time constraints act on
publication dates only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

from .errors import NoMatchesError
from .index import Index
from .months import clip_interval, month_index

if TYPE_CHECKING:  # pragma: no cover
    from .config import Params
    from .ranking import QueryRequest, ScoredDoc


@dataclass(frozen=True)
class Constraints:
    time: tuple[str, str] | None = None
    entities: frozenset[str] = frozenset()
    article_types: frozenset[str] = frozenset()

    def __bool__(self) -> bool:
        return bool(self.time or self.entities or self.article_types)

    def with_entity(self, entity_id: str) -> "Constraints":
        return Constraints(self.time, self.entities | {entity_id}, self.article_types)

    def with_time(self, start: str, end: str) -> "Constraints":
        return Constraints((start, end), self.entities, self.article_types)

    def cleared(self, kind: str) -> "Constraints":
        if kind == "time":
            return Constraints(None, self.entities, self.article_types)
        if kind == "entities":
            return Constraints(self.time, frozenset(), self.article_types)
        if kind == "article_types":
            return Constraints(self.time, self.entities, frozenset())
        if kind == "all":
            return Constraints()
        raise ValueError(f"unknown constraint kind: {kind!r}")

    def to_json(self) -> dict:
        return {
            "time": {"start": self.time[0], "end": self.time[1]} if self.time else None,
            "entities": sorted(self.entities),
            "article_types": sorted(self.article_types),
        }

    @classmethod
    def from_json(cls, obj: dict | None) -> "Constraints":
        if not obj:
            return cls()
        time = obj.get("time")
        interval = None
        if time:
            interval = (str(time["start"]), str(time["end"]))
            month_index(interval[0]), month_index(interval[1])  # validate
        return cls(
            time=interval,
            entities=frozenset(obj.get("entities", ())),
            article_types=frozenset(obj.get("article_types", ())),
        )


def matches(index: Index, doc_id: str, constraints: Constraints) -> bool:
    """True iff the document satisfies every active constraint."""
    if constraints.time is not None:
        interval = clip_interval(constraints.time, index.span)
        if interval is None:
            return False
        bucket = index.doc_bucket[doc_id]
        if not (month_index(interval[0]) <= month_index(bucket) <= month_index(interval[1])):
            return False
    if constraints.entities and not constraints.entities <= index.doc_entities[doc_id]:
        return False
    if constraints.article_types and index.doc_type[doc_id] not in constraints.article_types:
        return False
    return True


def matching_doc_ids(index: Index, constraints: Constraints | None) -> list[str] | None:
    """Sorted ids of documents satisfying constraints; None = everything."""
    if not constraints:
        return None
    return [d for d in index.doc_ids if matches(index, d, constraints)]


def refine(
    index: Index,
    previous: Sequence[str],
    request: "QueryRequest",
    params: "Params | None" = None,
) -> "list[ScoredDoc]":
    """Constrained re-query with previous results pinned on top.

    Segment 1 keeps the previous results that satisfy the constraints, in
    their original order; segment 2 appends the constrained model ranking
    minus segment 1.  Ranks are renumbered across both segments and the
    whole list is capped at request.k.
    """
    from . import ranking  # deferred: ranking dispatches back through matches()
    from .config import DEFAULTS
    from .ranking import ScoredDoc

    params = params or DEFAULTS
    constraints = request.constraints or Constraints()
    eligible = matching_doc_ids(index, constraints)
    if eligible is not None and not eligible:
        raise NoMatchesError("no_constraint_matches", "no document satisfies the constraints")

    survivors = [d for d in previous if matches(index, d, constraints)]
    need = request.k + len(survivors)
    model_list = ranking.rank(request.with_k(need), index, params)
    by_id = {sd.doc_id: sd for sd in model_list}

    seen = set(survivors)
    merged: list[tuple[str, float]] = []
    for doc_id in survivors:
        sd = by_id.get(doc_id)
        score = sd.score if sd is not None else ranking.lm_score_one(
            index, ranking.parse_query(request.q), doc_id, params
        )
        merged.append((doc_id, score))
    for sd in model_list:
        if sd.doc_id not in seen:
            merged.append((sd.doc_id, sd.score))
    merged = merged[: request.k]
    return [ScoredDoc(doc_id, score, rank) for rank, (doc_id, score) in enumerate(merged, 1)]
