"""Pluggable natural-language-to-SQL backend contract plus a query cache.

Two backends ship with the package: a deterministic fixture backend (exact
normalized-text lookup from a JSON file, used for tests and demos) and a
remote backend posting ``{"query", "schema"}`` to an HTTP service and reading
back ``{"sql"}``. The cache keys on (database id, normalized query text),
delegates to the inner backend at most once per distinct key even under
concurrency, and never caches errors.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Protocol

import httpx

from .errors import BackendUnavailable, NoTranslation
from .onboarding import OnboardedDatabase
from .temporal import NormalizedQuery

DEFAULT_TIMEOUT_SECONDS = 10.0


@dataclass(frozen=True)
class CandidateSql:
    sql: str
    backend_id: str
    from_cache: bool = False


@dataclass(frozen=True)
class QueryCacheKey:
    database_id: str
    normalized_text: str


class Translator(Protocol):
    backend_id: str

    def translate(self, query: NormalizedQuery, schema: OnboardedDatabase) -> CandidateSql: ...


class FixtureTranslator:
    """Exact lookup of normalized query text in a JSON array of
    {"pattern": ..., "sql": ...} entries."""

    backend_id = "fixture"

    def __init__(self, entries: Optional[list[dict]] = None, path: Optional[Path] = None):
        if path is not None:
            entries = json.loads(Path(path).read_text(encoding="utf-8"))
        self._patterns: dict[str, str] = {e["pattern"]: e["sql"] for e in (entries or [])}

    def translate(self, query: NormalizedQuery, schema: OnboardedDatabase) -> CandidateSql:
        sql = self._patterns.get(query.normalized)
        if sql is None:
            raise NoTranslation(
                f"no translation for {query.normalized!r}; please check the query again"
            )
        return CandidateSql(sql=sql, backend_id=self.backend_id)


class RemoteTranslator:
    """POST /translate against a remote model server."""

    backend_id = "remote"

    def __init__(self, base_url: str, timeout: float = DEFAULT_TIMEOUT_SECONDS):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def translate(self, query: NormalizedQuery, schema: OnboardedDatabase) -> CandidateSql:
        payload = {"query": query.normalized, "schema": schema.to_wire_schema()}
        try:
            response = httpx.post(f"{self.base_url}/translate", json=payload, timeout=self.timeout)
            response.raise_for_status()
            sql = response.json()["sql"]
        except (httpx.HTTPError, KeyError, ValueError) as exc:
            raise BackendUnavailable(f"translation backend failed: {exc}") from exc
        if not sql:
            raise BackendUnavailable("translation backend returned empty SQL")
        return CandidateSql(sql=sql, backend_id=self.backend_id)


class _Flight:
    __slots__ = ("event", "result", "error")

    def __init__(self):
        self.event = threading.Event()
        self.result: Optional[CandidateSql] = None
        self.error: Optional[BaseException] = None


class CachedTranslator:
    """Single-flight cache around an inner backend.

    The first call for a distinct key delegates and stores; identical keys
    return the stored SQL with from_cache=True. Errors propagate and are not
    cached. An optional persistence hook (``persist``/``lookup``) writes
    through to durable storage so the cache survives restarts.
    """

    def __init__(
        self,
        inner: Translator,
        persist: Optional[Callable[[QueryCacheKey, CandidateSql], None]] = None,
        lookup: Optional[Callable[[QueryCacheKey], Optional[CandidateSql]]] = None,
    ):
        self.inner = inner
        self.backend_id = inner.backend_id
        self._persist = persist
        self._lookup = lookup
        self._memory: dict[QueryCacheKey, CandidateSql] = {}
        self._flights: dict[QueryCacheKey, _Flight] = {}
        self._lock = threading.Lock()

    def translate_cached(
        self, key: QueryCacheKey, query: NormalizedQuery, schema: OnboardedDatabase
    ) -> CandidateSql:
        with self._lock:
            hit = self._memory.get(key)
            if hit is not None:
                return CandidateSql(sql=hit.sql, backend_id=hit.backend_id, from_cache=True)
            flight = self._flights.get(key)
            owner = flight is None
            if owner:
                flight = _Flight()
                self._flights[key] = flight
        if not owner:
            flight.event.wait()
            if flight.error is not None:
                raise flight.error
            done = flight.result
            return CandidateSql(sql=done.sql, backend_id=done.backend_id, from_cache=True)

        try:
            if self._lookup is not None:
                persisted = self._lookup(key)
                if persisted is not None:
                    fresh = CandidateSql(sql=persisted.sql, backend_id=persisted.backend_id,
                                         from_cache=True)
                    with self._lock:
                        self._memory[key] = fresh
                    flight.result = fresh
                    return fresh
            result = self.inner.translate(query, schema)
            with self._lock:
                self._memory[key] = result
            if self._persist is not None:
                self._persist(key, result)
            flight.result = result
            return result
        except BaseException as exc:
            flight.error = exc
            raise
        finally:
            with self._lock:
                self._flights.pop(key, None)
            flight.event.set()
