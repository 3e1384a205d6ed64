"""Time-aware exploratory search engine for annotated document archives."""

from .config import DEFAULTS, Params
from .corpus import Corpus, Document, EntityMention, TemporalRef, ingest, trivial_annotate
from .errors import (
    EmptyCorpusError,
    ExpeditionError,
    IndexLoadError,
    IndexVersionError,
    IngestError,
    NoMatchesError,
    SchemaError,
)
from .index import Index, build, load, save, tokenize
from .ranking import (
    CandidatePool,
    QueryRequest,
    RetrievalModel,
    ScoredDoc,
    rank,
)
from .refine import Constraints, refine
from .timeline import TimelineProfile, build_timeline

__version__ = "0.1.0"

__all__ = [
    "Corpus",
    "CandidatePool",
    "Constraints",
    "DEFAULTS",
    "Document",
    "EmptyCorpusError",
    "EntityMention",
    "ExpeditionError",
    "Index",
    "IndexLoadError",
    "IndexVersionError",
    "IngestError",
    "NoMatchesError",
    "Params",
    "QueryRequest",
    "RetrievalModel",
    "SchemaError",
    "ScoredDoc",
    "TemporalRef",
    "TimelineProfile",
    "build",
    "build_timeline",
    "ingest",
    "load",
    "rank",
    "refine",
    "save",
    "tokenize",
    "trivial_annotate",
]
