"""Synthetic corpus generator for desk-scale experiments and tests.

Produces an annotated corpus file in the interchange format with a flat
publication baseline plus configurable publication spikes: each spike
spec plants a group of documents containing its topic terms and
concentrates a chosen fraction of that group inside its month interval.
Generation is fully deterministic for a fixed seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from datetime import date
from pathlib import Path

from .corpus import TITLE_SEP, Document, EntityMention, TemporalRef, serialize
from .months import MONTH_NAMES, month_range

# Filler vocabulary; deliberately disjoint from anything a test queries for.
_WORDS = [
    "harbor", "council", "runway", "ledger", "garden", "quarry", "bridge",
    "estate", "filament", "meadow", "signal", "packet", "lantern", "summit",
    "gallery", "timber", "anchor", "furnace", "parade", "listing", "ribbon",
    "orchard", "tunnel", "market", "vessel", "turbine", "canvas", "module",
    "hollow", "current", "granite", "saddle", "monitor", "chapel", "austere",
    "brigade", "cipher", "drawer", "embassy", "foundry", "glacier",
]


@dataclass(frozen=True)
class SpikeSpec:
    """One publication spike: interval, topic terms, in-interval fraction."""

    interval: tuple[str, str]
    terms: tuple[str, ...]
    intensity: float


def _spread(months: list[str], count: int, rng: random.Random) -> list[str]:
    """count month assignments, as evenly as possible, order shuffled."""
    if count <= 0:
        return []
    reps = count // len(months)
    out = months * reps + months[: count % len(months)]
    rng.shuffle(out)
    return out


def generate_synthetic(
    path: str | Path,
    *,
    seed: int,
    n_docs: int,
    span: tuple[str, str],
    n_entities: int = 20,
    spikes: list[SpikeSpec] | None = None,
    topic_frac: float = 0.1,
) -> list[Document]:
    """Write a synthetic corpus file; returns the generated documents.

    Baseline documents are spread evenly over the span (exactly flat when
    n_docs divides by the month count).  For each spike spec,
    round(topic_frac * n_docs) documents carry the topic terms;
    round(intensity * group) of those publish inside the spike interval
    and the rest are spread evenly outside it.
    """
    if n_docs < 1:
        raise ValueError("n_docs must be >= 1")
    spikes = spikes or []
    months = month_range(*span)
    month_set = set(months)
    for spike in spikes:
        if spike.interval[0] not in month_set or spike.interval[1] not in month_set:
            raise ValueError(f"spike interval {spike.interval} outside span {span}")
        if not 0.0 <= spike.intensity <= 1.0:
            raise ValueError("spike intensity must be in [0, 1]")

    rng = random.Random(seed)
    entity_ids = [f"E:ent{i:03d}" for i in range(n_entities)]

    # (month, topic terms or None) per document
    plan: list[tuple[str, tuple[str, ...] | None]] = []
    for spike in spikes:
        group = max(1, round(topic_frac * n_docs))
        inside = round(spike.intensity * group)
        interval_months = month_range(*spike.interval)
        outside_months = [m for m in months if m not in set(interval_months)] or months
        for m in _spread(interval_months, inside, rng):
            plan.append((m, spike.terms))
        for m in _spread(outside_months, group - inside, rng):
            plan.append((m, spike.terms))
    n_base = n_docs - len(plan)
    if n_base < 0:
        raise ValueError("spike groups exceed n_docs; lower topic_frac")
    for m in _spread(months, n_base, rng):
        plan.append((m, None))
    rng.shuffle(plan)

    documents = []
    for i, (month, terms) in enumerate(plan):
        documents.append(_make_doc(rng, f"d{i:05d}", month, terms, entity_ids))
    serialize(documents, path)
    return documents


def _make_doc(
    rng: random.Random,
    doc_id: str,
    month: str,
    terms: tuple[str, ...] | None,
    entity_ids: list[str],
) -> Document:
    year, mon = int(month[:4]), int(month[5:7])
    published = date(year, mon, rng.randint(1, 28))

    title_words = rng.sample(_WORDS, 2)
    title = f"Dispatch {doc_id}: {title_words[0]} {title_words[1]}"
    if terms:
        title += " " + " ".join(terms)

    # Body assembled token by token so annotation offsets are exact.
    pieces: list[str] = ["archive", "report:"]
    pieces += rng.choices(_WORDS, k=rng.randint(30, 80))
    if terms:
        for _ in range(rng.randint(1, 3)):
            at = rng.randint(2, len(pieces))
            pieces[at:at] = list(terms)

    # Marked insertions; positions of earlier marks shift as later pieces land.
    marks: list[tuple[int, str]] = []  # (piece position, entity_id or "" for the ref)

    def insert_piece(at: int, piece: str, tag: str) -> None:
        pieces.insert(at, piece)
        for j, (pos, t) in enumerate(marks):
            if pos >= at:
                marks[j] = (pos + 1, t)
        marks.append((at, tag))

    if entity_ids:
        for entity_id in rng.sample(entity_ids, k=min(rng.randint(0, 3), len(entity_ids))):
            surface = "Entity" + entity_id.split("ent")[-1]
            insert_piece(rng.randint(2, len(pieces)), surface, entity_id)

    # Every document carries one reference to its own publication month.
    ref_phrase = f"{MONTH_NAMES[mon - 1]} {year}"
    ref_at = rng.randint(2, len(pieces))
    insert_piece(ref_at, "in", "skip")
    insert_piece(ref_at + 1, ref_phrase, "")

    offsets = []
    cursor = 0
    for piece in pieces:
        offsets.append((cursor, cursor + len(piece)))
        cursor += len(piece) + 1
    body = " ".join(pieces)
    shift = len(title) + len(TITLE_SEP)

    mentions = []
    refs = []
    for pos, tag in sorted(marks):
        start, end = offsets[pos][0] + shift, offsets[pos][1] + shift
        if tag == "skip":
            continue
        if tag == "":
            refs.append(TemporalRef(month, month, start, end))
        else:
            mentions.append(EntityMention(tag, pieces[pos], start, end, False))

    return Document(
        doc_id=doc_id,
        title=title,
        body=body,
        published=published,
        article_type=rng.choice(["news", "news", "news", "opinion", "letter"]),
        entity_mentions=tuple(mentions),
        temporal_refs=tuple(refs),
    )
