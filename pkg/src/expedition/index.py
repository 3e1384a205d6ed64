"""Immutable inverted/entity/time index with collection statistics.

Tokenization is fixed for the whole engine: lowercase, split on
non-alphanumeric, drop empty tokens.  No stemming, no stopword removal.
Snippet extraction and ranking share this exact tokenizer so scores and
previews never disagree about what a term is.

Persistence is a single versioned JSON file holding the accepted
document records; loading rebuilds the derived structures, which keeps
the index a pure function of the corpus bytes.
"""

from __future__ import annotations

import json
import re
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path

from .corpus import Corpus, Document, _parse_record, record_of
from .errors import EmptyCorpusError, IndexLoadError, IndexVersionError

FORMAT_NAME = "expedition-index"
FORMAT_VERSION = 1
INDEX_FILENAME = "index.json"

_TOKEN_RE = re.compile(r"[0-9A-Za-z]+")


def tokenize(text: str) -> list[str]:
    return [m.group().lower() for m in _TOKEN_RE.finditer(text)]


def token_spans(text: str) -> list[tuple[str, int, int]]:
    """Tokens with their character spans in the original text."""
    return [(m.group().lower(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


@dataclass
class Index:
    docs: dict[str, Document]
    doc_ids: list[str]                          # sorted, the canonical order
    postings: dict[str, dict[str, int]]         # term -> doc_id -> tf
    doc_len: dict[str, int]
    doc_bucket: dict[str, str]
    doc_type: dict[str, str]
    doc_entities: dict[str, frozenset[str]]
    entity_docs: dict[str, set[str]]
    bucket_docs: dict[str, set[str]]
    collection_tf: dict[str, int]
    collection_len: int
    span: tuple[str, str]

    def __len__(self) -> int:
        return len(self.doc_ids)

    def tf(self, term: str, doc_id: str) -> int:
        return self.postings.get(term, {}).get(doc_id, 0)


def build(corpus: Corpus) -> Index:
    """Build the index; deterministic for a given corpus."""
    if not corpus.documents:
        raise EmptyCorpusError("cannot index an empty corpus")
    docs = {d.doc_id: d for d in corpus.documents}
    doc_ids = sorted(docs)

    postings: dict[str, dict[str, int]] = defaultdict(dict)
    doc_len: dict[str, int] = {}
    doc_bucket: dict[str, str] = {}
    doc_type: dict[str, str] = {}
    doc_entities: dict[str, frozenset[str]] = {}
    entity_docs: dict[str, set[str]] = defaultdict(set)
    bucket_docs: dict[str, set[str]] = defaultdict(set)
    collection_tf: Counter = Counter()
    collection_len = 0

    for doc_id in doc_ids:
        doc = docs[doc_id]
        tokens = tokenize(doc.full_text())
        counts = Counter(tokens)
        for term, tf in counts.items():
            postings[term][doc_id] = tf
        collection_tf.update(counts)
        collection_len += len(tokens)
        doc_len[doc_id] = len(tokens)
        doc_bucket[doc_id] = doc.month
        doc_type[doc_id] = doc.article_type
        ents = doc.entity_ids()
        doc_entities[doc_id] = ents
        for e in ents:
            entity_docs[e].add(doc_id)
        bucket_docs[doc.month].add(doc_id)

    assert corpus.span is not None
    return Index(
        docs=docs,
        doc_ids=doc_ids,
        postings=dict(postings),
        doc_len=doc_len,
        doc_bucket=doc_bucket,
        doc_type=doc_type,
        doc_entities=doc_entities,
        entity_docs=dict(entity_docs),
        bucket_docs=dict(bucket_docs),
        collection_tf=dict(collection_tf),
        collection_len=collection_len,
        span=corpus.span,
    )


def _index_file(path: Path) -> Path:
    return path / INDEX_FILENAME if path.is_dir() or not path.suffix else path


def save(index: Index, path: str | Path) -> Path:
    """Persist to a single versioned file; byte-stable for a given index."""
    path = Path(path)
    if not path.suffix:
        path.mkdir(parents=True, exist_ok=True)
    target = _index_file(path)
    payload = {
        "format": FORMAT_NAME,
        "format_version": FORMAT_VERSION,
        "span": list(index.span),
        "documents": [record_of(index.docs[d]) for d in index.doc_ids],
    }
    target.write_text(
        json.dumps(payload, sort_keys=True, ensure_ascii=False), encoding="utf-8"
    )
    return target


def load(path: str | Path) -> Index:
    """Load an index file written by save(); never silently misreads."""
    target = _index_file(Path(path))
    try:
        raw = target.read_text(encoding="utf-8")
    except OSError as exc:
        raise IndexLoadError(f"cannot read index file {target}: {exc}") from exc
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise IndexLoadError(f"corrupt index file {target}: {exc.msg}") from exc
    if not isinstance(payload, dict) or payload.get("format") != FORMAT_NAME:
        raise IndexLoadError(f"{target} is not an index file")
    if payload.get("format_version") != FORMAT_VERSION:
        raise IndexVersionError(
            f"index format version {payload.get('format_version')!r}, "
            f"expected {FORMAT_VERSION}"
        )
    try:
        documents = [_parse_record(obj) for obj in payload["documents"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise IndexLoadError(f"corrupt index file {target}: {exc}") from exc
    if not documents:
        raise IndexLoadError(f"index file {target} holds no documents")
    from .corpus import IngestReport

    buckets = [d.month for d in documents]
    corpus = Corpus(
        documents=documents,
        span=(min(buckets), max(buckets)),
        report=IngestReport(total_lines=len(documents), accepted=len(documents)),
    )
    return build(corpus)
