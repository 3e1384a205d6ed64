"""Search-trail state machine, saved-article bookkeeping, export, replay.

Live exploration state belongs to the client; this module is the
authoritative schema plus a reference implementation of the transitions,
so a session can be validated, exported, re-imported byte-identically,
and replayed headlessly against an index.

The trail is append-only.  Revisiting an old stage only moves the
cursor; the next action branches from the revisited stage (parent
pointers form a tree) while the displayed list stays append-ordered.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable

import jsonschema

from .config import DEFAULTS, Params
from .errors import SchemaError
from .index import Index
from .months import month_index
from .ranking import QueryRequest, RetrievalModel, ScoredDoc
from .refine import Constraints, refine

EXPORT_FORMAT_VERSION = 1


# --- actions ------------------------------------------------------------

@dataclass(frozen=True)
class NewQuery:
    query: str
    model: RetrievalModel | None = None


@dataclass(frozen=True)
class ChangeModel:
    model: RetrievalModel


@dataclass(frozen=True)
class SelectTime:
    start: str
    end: str


@dataclass(frozen=True)
class SelectEntity:
    entity_id: str


@dataclass(frozen=True)
class ClearConstraint:
    kind: str = "all"  # time | entities | article_types | all


Action = NewQuery | ChangeModel | SelectTime | SelectEntity | ClearConstraint


# --- session ------------------------------------------------------------

@dataclass(frozen=True)
class TrailStage:
    stage_id: int
    parent_id: int | None
    query_text: str
    model: RetrievalModel
    constraints: Constraints
    created_at: str


@dataclass(frozen=True)
class CorpusEntry:
    doc_id: str
    headline: str
    saved_from_stage: int
    query_text: str


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class Session:
    session_id: str
    created_at: str
    stages: list[TrailStage] = field(default_factory=list)
    current_stage: int | None = None
    corpus: list[CorpusEntry] = field(default_factory=list)
    now: Callable[[], str] = field(default=_utcnow, repr=False, compare=False)

    @classmethod
    def new(cls, session_id: str | None = None, now: Callable[[], str] = _utcnow) -> "Session":
        return cls(session_id=session_id or uuid.uuid4().hex, created_at=now(), now=now)

    def stage(self, stage_id: int) -> TrailStage:
        for st in self.stages:
            if st.stage_id == stage_id:
                return st
        raise KeyError(f"unknown stage id: {stage_id}")

    def current(self) -> TrailStage | None:
        return self.stage(self.current_stage) if self.current_stage is not None else None


def _next_state(
    current: TrailStage | None, action: Action
) -> tuple[str, RetrievalModel, Constraints]:
    if isinstance(action, NewQuery):
        if not action.query.strip():
            raise ValueError("query must be non-empty")
        model = action.model or (current.model if current else RetrievalModel.TEXTUAL)
        # A fresh query starts a fresh direction: constraints reset.
        return action.query, model, Constraints()
    if current is None:
        raise ValueError("the first trail stage must come from a new query")
    if isinstance(action, ChangeModel):
        return current.query_text, action.model, current.constraints
    if isinstance(action, SelectTime):
        if month_index(action.start) > month_index(action.end):
            raise ValueError("time selection start after end")
        return current.query_text, current.model, current.constraints.with_time(
            action.start, action.end
        )
    if isinstance(action, SelectEntity):
        return current.query_text, current.model, current.constraints.with_entity(
            action.entity_id
        )
    if isinstance(action, ClearConstraint):
        return current.query_text, current.model, current.constraints.cleared(action.kind)
    raise TypeError(f"unknown action: {action!r}")


def apply_action(session: Session, action: Action) -> Session:
    """Append a stage for the action; identical resulting state is a no-op."""
    current = session.current()
    query, model, constraints = _next_state(current, action)
    if current is not None and (
        query, model, constraints
    ) == (current.query_text, current.model, current.constraints):
        return session
    stage = TrailStage(
        stage_id=(session.stages[-1].stage_id + 1) if session.stages else 1,
        parent_id=session.current_stage,
        query_text=query,
        model=model,
        constraints=constraints,
        created_at=session.now(),
    )
    session.stages.append(stage)
    session.current_stage = stage.stage_id
    return session


def revisit(session: Session, stage_id: int) -> Session:
    """Move the cursor to an earlier stage; nothing is appended."""
    session.stage(stage_id)  # raises on unknown id
    session.current_stage = stage_id
    return session


def save_article(session: Session, doc_id: str, headline: str) -> Session:
    """Add one article to the scholar's corpus; re-saving is a no-op."""
    current = session.current()
    if current is None:
        raise ValueError("cannot save before the first query")
    if any(entry.doc_id == doc_id for entry in session.corpus):
        return session
    session.corpus.append(
        CorpusEntry(
            doc_id=doc_id,
            headline=headline,
            saved_from_stage=current.stage_id,
            query_text=current.query_text,
        )
    )
    return session


# --- export / import ----------------------------------------------------

EXPORT_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["format_version", "session_id", "created_at", "stages", "corpus"],
    "additionalProperties": False,
    "properties": {
        "format_version": {"const": EXPORT_FORMAT_VERSION},
        "session_id": {"type": "string", "minLength": 1},
        "created_at": {"type": "string"},
        "stages": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "parent", "query", "model", "constraints", "ts"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "integer", "minimum": 1},
                    "parent": {"type": ["integer", "null"]},
                    "query": {"type": "string", "minLength": 1},
                    "model": {
                        "enum": ["TEXTUAL", "TEMPORAL", "TEMPORAL_DIV", "TOPICAL_DIV", "HIST_DIV"]
                    },
                    "constraints": {
                        "type": "object",
                        "required": ["time", "entities", "article_types"],
                        "additionalProperties": False,
                        "properties": {
                            "time": {
                                "type": ["object", "null"],
                                "required": ["start", "end"],
                                "additionalProperties": False,
                                "properties": {
                                    "start": {"type": "string", "pattern": "^\\d{4}-\\d{2}$"},
                                    "end": {"type": "string", "pattern": "^\\d{4}-\\d{2}$"},
                                },
                            },
                            "entities": {"type": "array", "items": {"type": "string"}},
                            "article_types": {"type": "array", "items": {"type": "string"}},
                        },
                    },
                    "ts": {"type": "string"},
                },
            },
        },
        "corpus": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["doc_id", "headline", "stage", "query"],
                "additionalProperties": False,
                "properties": {
                    "doc_id": {"type": "string", "minLength": 1},
                    "headline": {"type": "string"},
                    "stage": {"type": "integer", "minimum": 1},
                    "query": {"type": "string"},
                },
            },
        },
    },
}


def export_doc(session: Session) -> dict:
    """Export document as a plain dict with a fixed key order."""
    return {
        "format_version": EXPORT_FORMAT_VERSION,
        "session_id": session.session_id,
        "created_at": session.created_at,
        "stages": [
            {
                "id": st.stage_id,
                "parent": st.parent_id,
                "query": st.query_text,
                "model": st.model.value,
                "constraints": st.constraints.to_json(),
                "ts": st.created_at,
            }
            for st in session.stages
        ],
        "corpus": [
            {
                "doc_id": entry.doc_id,
                "headline": entry.headline,
                "stage": entry.saved_from_stage,
                "query": entry.query_text,
            }
            for entry in session.corpus
        ],
    }


def export_json(session: Session) -> str:
    return json.dumps(export_doc(session), indent=2, ensure_ascii=False) + "\n"


def validate_export(doc: dict) -> None:
    """Raise SchemaError with a JSON path on the first violation."""
    validator = jsonschema.Draft202012Validator(EXPORT_SCHEMA)
    error = jsonschema.exceptions.best_match(validator.iter_errors(doc))
    if error is not None:
        raise SchemaError(error.json_path, error.message)
    ids = [st["id"] for st in doc["stages"]]
    if sorted(set(ids)) != ids:
        raise SchemaError("$.stages", "stage ids must be strictly increasing")
    known = set()
    roots = 0
    for st in doc["stages"]:
        if st["parent"] is None:
            roots += 1
        elif st["parent"] not in known:
            raise SchemaError(
                f"$.stages[{ids.index(st['id'])}].parent",
                "parent must be an earlier stage id",
            )
        known.add(st["id"])
    if doc["stages"] and roots != 1:
        raise SchemaError("$.stages", "exactly one stage may lack a parent")
    for i, entry in enumerate(doc["corpus"]):
        if entry["stage"] not in known:
            raise SchemaError(f"$.corpus[{i}].stage", "references an unknown stage")


def import_doc(doc: dict) -> Session:
    validate_export(doc)
    session = Session(session_id=doc["session_id"], created_at=doc["created_at"])
    for st in doc["stages"]:
        session.stages.append(
            TrailStage(
                stage_id=st["id"],
                parent_id=st["parent"],
                query_text=st["query"],
                model=RetrievalModel(st["model"]),
                constraints=Constraints.from_json(st["constraints"]),
                created_at=st["ts"],
            )
        )
    if session.stages:
        session.current_stage = session.stages[-1].stage_id
    for entry in doc["corpus"]:
        session.corpus.append(
            CorpusEntry(entry["doc_id"], entry["headline"], entry["stage"], entry["query"])
        )
    return session


def import_json(text: str) -> Session:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"not valid JSON: {exc.msg}")
    return import_doc(doc)


# --- replay ---------------------------------------------------------------

@dataclass(frozen=True)
class StageReplay:
    stage_id: int
    query: str
    model: str
    result_count: int
    result_ids: tuple[str, ...]


@dataclass(frozen=True)
class EntryCheck:
    doc_id: str
    stage_id: int
    found: bool


@dataclass
class ReplayReport:
    stages: list[StageReplay]
    entries: list[EntryCheck]

    @property
    def all_found(self) -> bool:
        return all(e.found for e in self.entries)


def replay(doc: dict, index: Index, params: Params = DEFAULTS) -> ReplayReport:
    """Re-execute every stage and verify each saved article still appears
    in its stage's result list.

    A stage whose query or model differs from its parent reruns from
    scratch; a constraints-only change replays as a refinement with the
    parent's results pinned on top, mirroring live selector behavior.
    """
    validate_export(doc)
    from .errors import NoMatchesError

    stages = {st["id"]: st for st in doc["stages"]}
    results: dict[int, list[ScoredDoc]] = {}
    reports = []
    for st in doc["stages"]:
        request = QueryRequest(
            q=st["query"],
            model=RetrievalModel(st["model"]),
            constraints=Constraints.from_json(st["constraints"]),
            k=params.k,
        )
        parent = stages.get(st["parent"]) if st["parent"] is not None else None
        pinned: list[str] = []
        if (
            parent is not None
            and st["query"] == parent["query"]
            and st["model"] == parent["model"]
        ):
            pinned = [sd.doc_id for sd in results.get(parent["id"], [])]
        try:
            ranked = refine(index, pinned, request, params)
        except NoMatchesError:
            ranked = []
        results[st["id"]] = ranked
        reports.append(
            StageReplay(
                stage_id=st["id"],
                query=st["query"],
                model=st["model"],
                result_count=len(ranked),
                result_ids=tuple(sd.doc_id for sd in ranked),
            )
        )
    checks = [
        EntryCheck(
            doc_id=entry["doc_id"],
            stage_id=entry["stage"],
            found=any(sd.doc_id == entry["doc_id"] for sd in results[entry["stage"]]),
        )
        for entry in doc["corpus"]
    ]
    return ReplayReport(stages=reports, entries=checks)
