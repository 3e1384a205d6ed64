"""Document model and the on-disk corpus interchange format.

A corpus file is UTF-8, one JSON object per line:

    {"id": ..., "title": ..., "body": ..., "published": "YYYY-MM-DD",
     "type": ..., "entities": [{"entity_id", "surface", "start", "end"}, ...],
     "times": [{"start": "YYYY-MM", "end": "YYYY-MM",
                "char_start", "char_end"}, ...]}

Unknown keys are ignored.  Character offsets address the concatenation
of title and body joined by a single newline, so one offset space covers
the whole article.  Ingest is best-effort: malformed lines are skipped
and reported, never fatal.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from datetime import date
from pathlib import Path

from .errors import IngestError
from .months import MONTH_NAMES, date_to_month, is_month, month_index

TITLE_SEP = "\n"


@dataclass(frozen=True)
class EntityMention:
    entity_id: str
    surface: str
    char_start: int
    char_end: int
    in_title: bool


@dataclass(frozen=True)
class TemporalRef:
    start_month: str
    end_month: str
    char_start: int
    char_end: int


@dataclass(frozen=True)
class Document:
    doc_id: str
    title: str
    body: str
    published: date
    article_type: str = "news"
    entity_mentions: tuple[EntityMention, ...] = ()
    temporal_refs: tuple[TemporalRef, ...] = ()

    def full_text(self) -> str:
        return self.title + TITLE_SEP + self.body

    @property
    def month(self) -> str:
        return date_to_month(self.published)

    def entity_ids(self) -> frozenset[str]:
        return frozenset(m.entity_id for m in self.entity_mentions)


@dataclass
class IngestIssue:
    line: int
    reason: str


@dataclass
class IngestReport:
    total_lines: int = 0
    accepted: int = 0
    errors: list[IngestIssue] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


@dataclass
class Corpus:
    """Immutable after ingest; safe for unlimited concurrent readers."""

    documents: list[Document]
    span: tuple[str, str] | None
    report: IngestReport

    def __post_init__(self):
        self.by_id = {d.doc_id: d for d in self.documents}

    def __len__(self) -> int:
        return len(self.documents)


def _parse_record(obj: dict) -> Document:
    """Decode one JSON record, raising ValueError on any violation."""
    if not isinstance(obj, dict):
        raise ValueError("record is not an object")
    doc_id = obj.get("id")
    if not isinstance(doc_id, str) or not doc_id:
        raise ValueError("missing or empty id")
    title = obj.get("title")
    body = obj.get("body")
    if not isinstance(title, str) or not isinstance(body, str):
        raise ValueError("title and body must be strings")
    try:
        published = date.fromisoformat(obj["published"])
    except (KeyError, TypeError, ValueError):
        raise ValueError("published must be a YYYY-MM-DD date")
    article_type = obj.get("type", "news")
    if not isinstance(article_type, str) or not article_type:
        raise ValueError("type must be a non-empty string")

    text_len = len(title) + len(TITLE_SEP) + len(body)
    mentions = []
    for i, ent in enumerate(obj.get("entities", [])):
        try:
            start, end = int(ent["start"]), int(ent["end"])
            entity_id, surface = str(ent["entity_id"]), str(ent["surface"])
        except (KeyError, TypeError, ValueError):
            raise ValueError(f"entities[{i}] malformed")
        if not entity_id:
            raise ValueError(f"entities[{i}] has empty entity_id")
        if not (0 <= start < end <= text_len):
            raise ValueError(f"entities[{i}] offsets outside title+body bounds")
        mentions.append(
            EntityMention(entity_id, surface, start, end, in_title=end <= len(title))
        )
    refs = []
    for i, t in enumerate(obj.get("times", [])):
        try:
            start_month, end_month = str(t["start"]), str(t["end"])
            cs, ce = int(t["char_start"]), int(t["char_end"])
        except (KeyError, TypeError, ValueError):
            raise ValueError(f"times[{i}] malformed")
        if not is_month(start_month) or not is_month(end_month):
            raise ValueError(f"times[{i}] months must be YYYY-MM")
        if month_index(start_month) > month_index(end_month):
            raise ValueError(f"times[{i}] start month after end month")
        if not (0 <= cs < ce <= text_len):
            raise ValueError(f"times[{i}] offsets outside title+body bounds")
        refs.append(TemporalRef(start_month, end_month, cs, ce))
    return Document(
        doc_id=doc_id,
        title=title,
        body=body,
        published=published,
        article_type=article_type,
        entity_mentions=tuple(mentions),
        temporal_refs=tuple(refs),
    )


def record_of(doc: Document) -> dict:
    """Encode a document back into the interchange schema."""
    return {
        "id": doc.doc_id,
        "title": doc.title,
        "body": doc.body,
        "published": doc.published.isoformat(),
        "type": doc.article_type,
        "entities": [
            {
                "entity_id": m.entity_id,
                "surface": m.surface,
                "start": m.char_start,
                "end": m.char_end,
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
    }


def ingest(path: str | Path) -> Corpus:
    """Load a corpus file, skipping and reporting invalid records."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IngestError(f"cannot read corpus file {path}: {exc}") from exc

    report = IngestReport()
    documents: list[Document] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        report.total_lines += 1
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            report.errors.append(IngestIssue(lineno, f"invalid JSON: {exc.msg}"))
            continue
        try:
            doc = _parse_record(obj)
        except ValueError as exc:
            report.errors.append(IngestIssue(lineno, str(exc)))
            continue
        if doc.doc_id in seen:
            report.errors.append(IngestIssue(lineno, f"duplicate doc_id {doc.doc_id!r}"))
            continue
        seen.add(doc.doc_id)
        documents.append(doc)
    report.accepted = len(documents)
    if not documents:
        report.warnings.append("no documents ingested")
        return Corpus(documents=[], span=None, report=report)
    buckets = [d.month for d in documents]
    span = (min(buckets), max(buckets))
    return Corpus(documents=documents, span=span, report=report)


def serialize(documents, path: str | Path) -> None:
    """Write documents in the interchange format, one JSON object per line."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for doc in documents:
            fh.write(json.dumps(record_of(doc), ensure_ascii=False) + "\n")


# --- trivial annotator -------------------------------------------------

_YEAR_RE = re.compile(r"\b(\d{4})\b")
_MONTH_YEAR_RE = re.compile(
    r"\b(" + "|".join(MONTH_NAMES) + r")\s+(\d{4})\b", re.IGNORECASE
)
_MONTH_NUM = {name.lower(): i + 1 for i, name in enumerate(MONTH_NAMES)}


def trivial_annotate(doc: Document, gazetteer: dict[str, str]) -> Document:
    """Dictionary-based stand-in for a real annotation pipeline.

    Adds an entity mention for every case-insensitive whole-word match of
    a gazetteer surface (searched over title and body), a single-month
    temporal reference for every "Month YYYY" phrase in the body, and a
    whole-year reference for every other four-digit year 1850-2100 in the
    body.  Already-present annotations are kept; re-running is a no-op.
    """
    if not gazetteer:
        raise ValueError("gazetteer must not be empty")
    text = doc.full_text()
    body_offset = len(doc.title) + len(TITLE_SEP)

    have_mentions = {(m.entity_id, m.char_start, m.char_end) for m in doc.entity_mentions}
    mentions = list(doc.entity_mentions)
    for surface in sorted(gazetteer):
        pattern = re.compile(r"\b" + re.escape(surface) + r"\b", re.IGNORECASE)
        entity_id = gazetteer[surface]
        for m in pattern.finditer(text):
            key = (entity_id, m.start(), m.end())
            if key in have_mentions:
                continue
            have_mentions.add(key)
            mentions.append(
                EntityMention(
                    entity_id=entity_id,
                    surface=m.group(),
                    char_start=m.start(),
                    char_end=m.end(),
                    in_title=m.end() <= len(doc.title),
                )
            )
    mentions.sort(key=lambda m: (m.char_start, m.char_end, m.entity_id))

    have_refs = {(r.start_month, r.end_month, r.char_start, r.char_end) for r in doc.temporal_refs}
    refs = list(doc.temporal_refs)
    claimed: list[tuple[int, int]] = []

    def add_ref(start_month: str, end_month: str, cs: int, ce: int) -> None:
        key = (start_month, end_month, cs, ce)
        if key not in have_refs:
            have_refs.add(key)
            refs.append(TemporalRef(start_month, end_month, cs, ce))

    for m in _MONTH_YEAR_RE.finditer(doc.body):
        year = int(m.group(2))
        if not 1850 <= year <= 2100:
            continue
        month = f"{year:04d}-{_MONTH_NUM[m.group(1).lower()]:02d}"
        cs, ce = m.start() + body_offset, m.end() + body_offset
        claimed.append((m.start(), m.end()))
        add_ref(month, month, cs, ce)
    for m in _YEAR_RE.finditer(doc.body):
        year = int(m.group(1))
        if not 1850 <= year <= 2100:
            continue
        if any(s <= m.start() and m.end() <= e for s, e in claimed):
            continue  # the year is part of a "Month YYYY" phrase
        add_ref(
            f"{year:04d}-01",
            f"{year:04d}-12",
            m.start() + body_offset,
            m.end() + body_offset,
        )
    refs.sort(key=lambda r: (r.char_start, r.char_end))

    return replace(doc, entity_mentions=tuple(mentions), temporal_refs=tuple(refs))
