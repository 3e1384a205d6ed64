"""Exception types shared across the engine."""

from __future__ import annotations


class ExpeditionError(Exception):
    """Base class for engine errors."""


class IngestError(ExpeditionError):
    """Corpus file cannot be read at all (missing, unreadable)."""


class EmptyCorpusError(ExpeditionError):
    """An index was requested over a corpus with no documents."""


class IndexLoadError(ExpeditionError):
    """Index file is corrupt or not an index file."""


class IndexVersionError(IndexLoadError):
    """Index file was written by an incompatible format version."""


class NoMatchesError(ExpeditionError):
    """A query cannot produce results.

    reason is "unseen_terms" when no query term occurs in the collection,
    or "no_constraint_matches" when active constraints exclude every
    document.
    """

    def __init__(self, reason: str, message: str | None = None):
        super().__init__(message or reason)
        self.reason = reason


class SchemaError(ExpeditionError):
    """A document failed validation against a published JSON schema."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message
