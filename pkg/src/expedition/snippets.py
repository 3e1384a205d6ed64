"""Query-biased text previews, sized by result rank.

Better-ranked results get larger previews: the word budget drops in
tiers as rank grows.  The snippet is the contiguous token window of the
article (title and body in one offset space) that covers the most
distinct query terms, the earliest such window on ties, and the
document prefix when no query term occurs at all.
"""

from __future__ import annotations

from collections import Counter

from .config import DEFAULTS, Params
from .corpus import Document
from .index import token_spans


def tier_budget(rank: int, params: Params = DEFAULTS) -> int:
    for max_rank, budget in params.snippet_tiers:
        if rank <= max_rank:
            return budget
    return params.snippet_tail_words


def snippet_for(
    doc: Document, terms: list[str], rank: int, params: Params = DEFAULTS
) -> str:
    """Best window of tier_budget(rank) tokens for the query terms."""
    text = doc.full_text()
    spans = token_spans(text)
    if not spans:
        return ""
    budget = tier_budget(rank, params)
    if len(spans) <= budget:
        return text[spans[0][1]:spans[-1][2]]
    return _best_window(text, spans, set(terms), budget)


def _best_window(text, spans, qset, budget) -> str:
    in_window: Counter = Counter()
    distinct = 0
    best_start, best_distinct = 0, -1
    for i in range(len(spans) - budget + 1):
        if i == 0:
            for tok, _, _ in spans[:budget]:
                if tok in qset:
                    if in_window[tok] == 0:
                        distinct += 1
                    in_window[tok] += 1
        else:
            out_tok = spans[i - 1][0]
            if out_tok in qset:
                in_window[out_tok] -= 1
                if in_window[out_tok] == 0:
                    distinct -= 1
            new_tok = spans[i + budget - 1][0]
            if new_tok in qset:
                if in_window[new_tok] == 0:
                    distinct += 1
                in_window[new_tok] += 1
        if distinct > best_distinct:
            best_start, best_distinct = i, distinct
    first, last = spans[best_start], spans[best_start + budget - 1]
    return text[first[1]:last[2]]
