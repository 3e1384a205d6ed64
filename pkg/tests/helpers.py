"""Shared builders for randomized test corpora."""

from __future__ import annotations

import random
from datetime import date

from expedition.corpus import (
    Corpus,
    Document,
    EntityMention,
    IngestReport,
    TemporalRef,
    TITLE_SEP,
)
from expedition.index import Index, build

VOCAB = [f"w{i:02d}" for i in range(18)]


def make_doc(
    doc_id: str,
    body_tokens: list[str],
    month: str,
    entities: list[str] | None = None,
    title: str | None = None,
    article_type: str = "news",
    refs: list[tuple[str, str]] | None = None,
) -> Document:
    """Document whose mentions point at real token offsets in the body."""
    title = title if title is not None else f"Title {doc_id}"
    entities = entities or []
    tokens = list(body_tokens)
    positions = []
    for e in entities:
        surface = "X" + e.replace(":", "")
        positions.append((len(tokens), e, surface))
        tokens.append(surface)
    body = " ".join(tokens)
    shift = len(title) + len(TITLE_SEP)
    offsets = []
    cursor = 0
    for tok in tokens:
        offsets.append((cursor, cursor + len(tok)))
        cursor += len(tok) + 1
    mentions = tuple(
        EntityMention(e, surface, offsets[pos][0] + shift, offsets[pos][1] + shift, False)
        for pos, e, surface in positions
    )
    year, mon = int(month[:4]), int(month[5:7])
    temporal = tuple(
        TemporalRef(start, end, 0, 1) for start, end in (refs or [])
    )
    return Document(
        doc_id=doc_id,
        title=title,
        body=body,
        published=date(year, mon, 15),
        article_type=article_type,
        entity_mentions=mentions,
        temporal_refs=temporal,
    )


def random_corpus(
    rng: random.Random,
    n_docs: int,
    months: list[str],
    n_entities: int = 4,
    vocab: list[str] = VOCAB,
) -> Corpus:
    entity_ids = [f"E:{chr(ord('a') + i)}" for i in range(n_entities)]
    docs = []
    for i in range(n_docs):
        ents = rng.sample(entity_ids, rng.randint(0, min(2, n_entities)))
        docs.append(
            make_doc(
                f"d{i:03d}",
                rng.choices(vocab, k=rng.randint(5, 30)),
                rng.choice(months),
                entities=ents,
            )
        )
    buckets = [d.month for d in docs]
    return Corpus(
        documents=docs,
        span=(min(buckets), max(buckets)),
        report=IngestReport(total_lines=n_docs, accepted=n_docs),
    )


def random_index(rng: random.Random, n_docs: int, months: list[str], **kw) -> Index:
    return build(random_corpus(rng, n_docs, months, **kw))
