"""Stateless REST API over one immutable index.

Exploration state (trail, saved corpus) lives in clients; every handler
here is a pure read of the index, so identical requests always produce
identical bodies and arbitrary request interleavings are safe.  All
endpoints accept k, alpha, gamma and burst_k overrides.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import timeline as timeline_mod
from .config import DEFAULTS, Params
from .entities import article_salience, query_entity_selectors
from .errors import NoMatchesError
from .index import Index
from .months import parse_interval
from .ranking import (
    QueryRequest,
    RetrievalModel,
    parse_query,
    rank,
    total_matching,
)
from .refine import Constraints, refine
from .snippets import snippet_for


class SearchBody(BaseModel):
    q: str
    model: str = "TEXTUAL"
    constraints: dict | None = None
    prev: list[str] | None = None
    k: int | None = None
    alpha: float | None = None
    gamma: float | None = None
    burst_k: float | None = None


def _parse_model(name: str) -> RetrievalModel:
    try:
        return RetrievalModel.parse(name)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


def _constraints_from_params(
    time: str | None, entities: list[str], types: list[str]
) -> Constraints:
    interval = None
    if time:
        try:
            interval = parse_interval(time)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
    return Constraints(
        time=interval,
        entities=frozenset(entities),
        article_types=frozenset(types),
    )


def _require_terms(q: str) -> list[str]:
    terms = parse_query(q)
    if not terms:
        raise HTTPException(status_code=400, detail="query must contain at least one term")
    return terms


def _result_payload(sd, index: Index, terms: list[str], params: Params) -> dict:
    doc = index.docs[sd.doc_id]
    return {
        "rank": sd.rank,
        "doc_id": sd.doc_id,
        "headline": doc.title,
        "snippet": snippet_for(doc, terms, sd.rank, params),
        "published": doc.published.isoformat(),
        "month": doc.month,
        "article_type": doc.article_type,
        "score": sd.score,
        "salient_entities": [
            {"entity_id": s.entity_id, "salience_score": s.salience_score}
            for s in article_salience(doc, params)
        ],
    }


def create_app(
    index: Index,
    params: Params = DEFAULTS,
    allow_origins: tuple[str, ...] = ("*",),
    ui_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="expedition", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(allow_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/api/health")
    def health() -> dict:
        from .index import FORMAT_VERSION

        return {
            "status": "ok",
            "doc_count": len(index),
            "span": list(index.span),
            "format_version": FORMAT_VERSION,
        }

    @app.post("/api/search")
    def search(body: SearchBody, request: Request) -> JSONResponse:
        overrides = _overrides(request)
        p = params.replace(
            k=body.k if body.k is not None else overrides.get("k"),
            alpha=body.alpha if body.alpha is not None else overrides.get("alpha"),
            gamma=body.gamma if body.gamma is not None else overrides.get("gamma"),
            burst_k=body.burst_k if body.burst_k is not None else overrides.get("burst_k"),
        )
        terms = _require_terms(body.q)
        model = _parse_model(body.model)
        try:
            constraints = Constraints.from_json(body.constraints)
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=f"bad constraints: {exc}")
        prev = list(body.prev or [])
        dropped = [d for d in prev if d not in index.docs]
        prev = [d for d in prev if d in index.docs]
        query = QueryRequest(q=body.q, model=model, constraints=constraints, k=p.k)
        try:
            if prev:
                ranked = refine(index, prev, query, p)
            else:
                ranked = rank(query, index, p)
            no_matches = False
        except NoMatchesError:
            ranked, no_matches = [], True
        return JSONResponse(
            {
                "results": [_result_payload(sd, index, terms, p) for sd in ranked],
                "total_matching": total_matching(index, terms, constraints),
                "no_matches": no_matches,
                "dropped_prev": dropped,
            }
        )

    @app.get("/api/timeline")
    def timeline(
        q: str,
        request: Request,
        model: str = "TEXTUAL",
        time: str | None = None,
        entity: list[str] = Query(default=[]),
        type: list[str] = Query(default=[]),
    ) -> JSONResponse:
        p = params.replace(**_overrides(request))
        _require_terms(q)
        query = QueryRequest(
            q=q,
            model=_parse_model(model),
            constraints=_constraints_from_params(time, entity, type),
            k=p.k,
        )
        profile = timeline_mod.build_timeline(query, index, p)
        return JSONResponse(timeline_mod.profile_payload(profile))

    @app.get("/api/entities")
    def entities(
        q: str,
        request: Request,
        model: str = "TEXTUAL",
        time: str | None = None,
        entity: list[str] = Query(default=[]),
        type: list[str] = Query(default=[]),
    ) -> JSONResponse:
        p = params.replace(**_overrides(request))
        _require_terms(q)
        query = QueryRequest(
            q=q,
            model=_parse_model(model),
            constraints=_constraints_from_params(time, entity, type),
            k=p.k,
        )
        try:
            ranked = rank(query, index, p)
        except NoMatchesError:
            ranked = []
        selectors = query_entity_selectors(ranked, index, p)
        return JSONResponse(
            [
                {
                    "entity_id": s.entity_id,
                    "doc_frequency": s.doc_frequency,
                    "salience_score": s.salience_score,
                }
                for s in selectors
            ]
        )

    @app.get("/api/document/{doc_id}")
    def document(doc_id: str) -> JSONResponse:
        doc = index.docs.get(doc_id)
        if doc is None:
            raise HTTPException(status_code=404, detail=f"unknown document: {doc_id}")
        return JSONResponse(
            {
                "doc_id": doc.doc_id,
                "headline": doc.title,
                "body": doc.body,
                "published": doc.published.isoformat(),
                "month": doc.month,
                "article_type": doc.article_type,
                "entities": [
                    {
                        "entity_id": m.entity_id,
                        "surface": m.surface,
                        "start": m.char_start,
                        "end": m.char_end,
                        "in_title": m.in_title,
                    }
                    for m in doc.entity_mentions
                ],
                "times": [
                    {
                        "start": r.start_month,
                        "end": r.end_month,
                        "char_start": r.char_start,
                        "char_end": r.char_end,
                    }
                    for r in doc.temporal_refs
                ],
                "salient_entities": [
                    {"entity_id": s.entity_id, "salience_score": s.salience_score}
                    for s in article_salience(doc, params)
                ],
            }
        )

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def _overrides(request: Request) -> dict:
    """k/alpha/gamma/burst_k query-string overrides, shared by all endpoints."""
    out: dict = {}
    qp = request.query_params
    try:
        if "k" in qp:
            out["k"] = int(qp["k"])
        for name in ("alpha", "gamma", "burst_k"):
            if name in qp:
                out[name] = float(qp[name])
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=f"bad override: {exc}")
    return out
