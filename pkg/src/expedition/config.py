"""Tunable knobs, grouped in one dataclass.

Defaults follow the engine's documented contract; the CLI and the REST
service expose per-request overrides for the ones users actually turn
(k, alpha, gamma, burst_k).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Params:
    # Textual language model
    mu: float = 2000.0            # Dirichlet smoothing mass
    pool_size: int = 1000         # pseudo-relevant candidate pool cap

    # Diversification
    gamma: float = 1.0            # temporal decay per already-covered month
    eta: float = 0.01             # relevance floor so aspect-free docs stay selectable
    top_entities: int = 20        # entity aspects kept for historical diversity
    top_buckets: int = 20         # month aspects kept for historical diversity
    aspect_docs: int = 100        # pool prefix used to estimate aspect priors

    # Timeline
    alpha: float = 0.5            # publication vs reference mixture weight
    burst_k: float = 1.0          # burst threshold: mean + burst_k * stddev
    burst_labels: int = 3
    placement_k: int = 10

    # Entity selectors
    selector_docs: int = 100
    selector_top: int = 10
    salience_title_weight: float = 2.0
    salience_early_weight: float = 1.0
    salience_early_frac: float = 0.2
    salience_threshold: float = 1.0

    # Results
    k: int = 50                   # default result-list length
    snippet_tiers: tuple[tuple[int, int], ...] = ((2, 100), (6, 60))
    snippet_tail_words: int = 30  # budget for every rank past the last tier

    def replace(self, **kwargs) -> "Params":
        """Copy with overrides; None values are ignored."""
        updates = {k: v for k, v in kwargs.items() if v is not None}
        return dataclasses.replace(self, **updates) if updates else self


DEFAULTS = Params()
